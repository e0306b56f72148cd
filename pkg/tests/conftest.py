from importlib import resources
from pathlib import Path

import pytest

from econofit.data_model import DecileSeries, parse_decile_csv, parse_macro_csv
from econofit.macro import parse_params_csv

FIXTURES = Path(__file__).parent / "fixtures"

FIN_1987 = (7880, 10807, 12337, 13777, 15144, 16506, 17936, 19606, 22070, 29012)
FIN_1988 = (8068, 11030, 12648, 14066, 15407, 16766, 18341, 20110, 22710, 30609)

COUNTRY_MODEL = {"fin": "fd_ccdf", "rou": "fd_ccdf", "us": "fd_pdf"}


def bundled(name: str) -> str:
    return resources.files("econofit.data").joinpath(name).read_text(encoding="utf-8")


def country_tables(country: str):
    params = parse_params_csv(bundled(f"{country}_params.csv"), COUNTRY_MODEL[country])
    macro = parse_macro_csv(bundled(f"{country}_macro.csv"))
    return params, macro


def decile(values, year=1987, kind="mean", unit="EUR", variable="income", basis="nominal"):
    return DecileSeries(year, variable, kind, basis, unit, tuple(values))


@pytest.fixture
def fin1987():
    return decile(FIN_1987, 1987)


@pytest.fixture
def fin1988():
    return decile(FIN_1988, 1988)


@pytest.fixture
def finland_csv():
    return FIXTURES / "finland_deciles.csv"


@pytest.fixture
def finland_series(finland_csv):
    return parse_decile_csv(finland_csv.read_text())
