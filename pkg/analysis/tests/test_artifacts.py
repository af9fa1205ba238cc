import textwrap

import numpy as np
import pytest

from stackplot import (CSV_COLUMNS, SchemaError, load_run, read_csv, read_vtk)

# hand-written 2x2x2 fixture; values enumerate the x-fastest file order
VTK_FIXTURE = textwrap.dedent("""\
    # vtk DataFile Version 3.0
    fixture
    ASCII
    DATASET STRUCTURED_POINTS
    DIMENSIONS 2 2 2
    ORIGIN 0.0 0.0 0.0
    SPACING 5.000000000e-10 5.000000000e-10 5.000000000e-10
    POINT_DATA 8
    SCALARS P double 1
    LOOKUP_TABLE default
    0.0
    1.0
    2.0
    3.0
    4.0
    5.0
    6.0
    7.0
    """)


def test_vtk_fixture_roundtrip(tmp_path):
    p = tmp_path / "P_vappm1.25_step300.vtk"
    p.write_text(VTK_FIXTURE)
    snap = read_vtk(p)
    assert snap.field == "P"
    assert snap.v_app == -1.25
    assert snap.step == 300
    assert snap.data.shape == (2, 2, 2)
    # file order is x-fastest: value = i + 2j + 4k
    for i in range(2):
        for j in range(2):
            for k in range(2):
                assert snap.data[i, j, k] == i + 2 * j + 4 * k
    assert snap.spacing == (5e-10, 5e-10, 5e-10)
    np.testing.assert_allclose(snap.cell_centers(0), [0.25e-9, 0.75e-9])


def test_vtk_rejects_wrong_cell_count(tmp_path):
    p = tmp_path / "P_vapp0_step0.vtk"
    p.write_text(VTK_FIXTURE.replace("DIMENSIONS 2 2 2", "DIMENSIONS 2 2 3"))
    with pytest.raises(SchemaError):
        read_vtk(p)


def test_csv_header_enforced(tmp_path):
    p = tmp_path / "sweep.csv"
    p.write_text("step,t_s,bogus\n1,2,3\n")
    with pytest.raises(SchemaError):
        read_csv(p)


def test_csv_parses_types(tmp_path):
    p = tmp_path / "sweep.csv"
    p.write_text(",".join(CSV_COLUMNS) + "\n"
                 + "3,1.2e-12,0.5,0.01,1.0,0.4,0.1,-2e-17,0.12,2,1\n")
    rows = read_csv(p)
    assert rows[0]["step"] == 3 and isinstance(rows[0]["step"], int)
    assert rows[0]["settled"] == 1
    assert rows[0]["F_total_J"] == -2e-17


def test_load_run_requires_csv(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_run(tmp_path)


def test_load_run_collects_snapshots(tmp_path):
    (tmp_path / "sweep.csv").write_text(",".join(CSV_COLUMNS) + "\n")
    (tmp_path / "P_vapp0_step0.vtk").write_text(VTK_FIXTURE)
    arts = load_run(tmp_path)
    assert arts.timeseries == []
    assert len(arts.snapshots) == 1
    snap = arts.find_snapshot("P", v_app=0.0)
    assert snap.step == 0
    with pytest.raises(KeyError):
        arts.find_snapshot("Phi")


def test_driver_csv_roundtrip(tmp_path):
    """Values parsed back from a simulator-written CSV equal the in-memory
    records to full printed precision."""
    ferrosim_io = pytest.importorskip("ferrosim.io")
    recs = [ferrosim_io.SweepRecord(step=7, t_s=2.8e-12, v_app_V=-0.75,
                                    Q_C_per_m2=0.0123456789012345,
                                    v_fe_avg_V=-0.31415926535,
                                    v_int_avg_V=-0.43584073465,
                                    F_total_J=-1.234e-17,
                                    P_mean_C_per_m2=-0.1597,
                                    fp_iters=2, settled=True)]
    path = ferrosim_io.write_csv(tmp_path / "sweep.csv", recs)
    rows = read_csv(path)
    assert len(rows) == 1
    row = rows[0]
    for name in CSV_COLUMNS:
        if name == "settled":
            assert row[name] == int(recs[0].settled)
        else:
            assert row[name] == getattr(recs[0], name)
