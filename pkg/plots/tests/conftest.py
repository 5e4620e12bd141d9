"""Minimal synthetic CSV fixtures, one per documented input schema."""

from __future__ import annotations

import pytest

AUC_CSV = """\
# generated: 2026-01-01T00:00:00+00:00
alg,f_first,f_second,alpha,instance,auc
de,2,1,0.000000,1,0.82
de,2,1,0.000000,2,0.78
de,2,1,0.500000,1,0.55
de,2,1,0.500000,2,0.51
de,2,1,1.000000,1,0.22
de,2,1,1.000000,2,0.26
de,3,1,0.000000,1,0.80
de,3,1,0.000000,2,0.76
de,3,1,0.500000,1,0.42
de,3,1,0.500000,2,0.44
de,3,1,1.000000,1,0.12
de,3,1,1.000000,2,0.10
pso,2,1,0.000000,1,0.70
pso,2,1,0.000000,2,0.68
pso,2,1,0.500000,1,0.60
pso,2,1,0.500000,2,0.58
pso,2,1,1.000000,1,0.30
pso,2,1,1.000000,2,0.34
pso,3,1,0.000000,1,0.66
pso,3,1,0.000000,2,0.64
pso,3,1,0.500000,1,0.48
pso,3,1,0.500000,2,0.50
pso,3,1,1.000000,1,0.20
pso,3,1,1.000000,2,0.18
"""

ERT_CSV = """\
# generated: 2026-01-01T00:00:00+00:00
alg,f_first,f_second,alpha,instance,target,ert
de,3,1,0.000000,1,1e-08,120
de,3,1,0.000000,2,1e-08,150
de,3,1,0.500000,1,1e-08,inf
de,3,1,0.500000,2,1e-08,900
de,3,1,1.000000,1,1e-08,inf
de,3,1,1.000000,2,1e-08,inf
pso,3,1,0.000000,1,1e-08,300
pso,3,1,0.500000,1,1e-08,inf
"""

RANK_CSV = """\
# generated: 2026-01-01T00:00:00+00:00
f_first,f_second,alpha,alg,rank,tied
2,1,0.000000,de,1,false
2,1,0.000000,pso,2,false
2,1,0.500000,pso,1,false
2,1,0.500000,de,2,false
2,1,1.000000,pso,1,false
2,1,1.000000,de,2,false
3,1,0.000000,de,1,false
3,1,0.000000,pso,2,false
3,1,0.500000,de,1,true
3,1,0.500000,pso,1,true
3,1,1.000000,pso,1,false
3,1,1.000000,de,2,false
"""

TRAJ_CSV = """\
# generated: 2026-01-01T00:00:00+00:00
alg,f_first,f_second,alpha,evals,geomean
de,3,1,0.000000,1,55.0
de,3,1,0.000000,10,3.2
de,3,1,0.000000,100,0.01
de,3,1,1.000000,1,80.0
de,3,1,1.000000,10,9.5
de,3,1,1.000000,100,0.9
pso,3,1,0.000000,1,60.0
pso,3,1,0.000000,10,5.0
pso,3,1,0.000000,100,0.05
"""

LANDSCAPE_CSV = """\
# generated: 2026-01-01T00:00:00+00:00
# optimum: -1.0 2.0
# best: -0.9 1.9
# best: 1.0 0.0
x,y,log10_value
-5,-5,3.5
-5,0,2.1
-5,5,2.8
0,-5,1.9
0,0,0.5
0,5,1.2
5,-5,3.0
5,0,2.2
5,5,3.3
"""

_CSV_TEXT = {
    "auc": AUC_CSV,
    "ert": ERT_CSV,
    "rank": RANK_CSV,
    "traj": TRAJ_CSV,
    "landscape": LANDSCAPE_CSV,
}


def write_csv(directory, table: str) -> str:
    path = directory / f"{table}.csv"
    path.write_text(_CSV_TEXT[table], encoding="utf-8")
    return str(path)


@pytest.fixture
def sample_inputs(tmp_path):
    """Input path tuples per figure kind, backed by the synthetic CSVs."""
    paths = {table: write_csv(tmp_path, table) for table in _CSV_TEXT}
    return {
        "heatmap": (paths["auc"],),
        "rankgrid": (paths["rank"],),
        "ert_scatter": (paths["ert"],),
        "auc_grid": (paths["auc"],),
        "auc_scatter": (paths["auc"],),
        "convergence": (paths["traj"],),
        "landscape": (paths["landscape"],),
    }
