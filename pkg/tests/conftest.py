"""Shared fixtures: synthetic curves, session-scoped study tables and a
full-scale test series, plus the optional IntCal20 file.

The heavy fixtures are session scoped so the statistical tests and the
acceptance suite reuse one generation run.  Seeds are fixed; every
asserted band was checked against the seeded output.
"""

from __future__ import annotations

import numpy as np
import pytest

import finedating as fd

STUDY_DATES = [-300.0 + 5.0 * i for i in range(61)]

TABLE_SEED_20_5 = 101
TABLE_SEED_50_5 = 202
TS3_SEED = 303


@pytest.fixture(scope="session")
def linear_curve():
    return fd.linear_curve(span=(-1000.0, 500.0), error=0.01)


@pytest.fixture(scope="session")
def flat_curve():
    return fd.flat_curve(level=2000.0, error=5.0, span=(-300.0, 0.0))


@pytest.fixture(scope="session")
def study_curve():
    return fd.synthetic_study_curve()


@pytest.fixture(scope="session")
def table_5_20_5(study_curve):
    return fd.build_reference_table(study_curve, fd.standard_spec("5_20_5", seed=TABLE_SEED_20_5))


@pytest.fixture(scope="session")
def table_5_50_5(study_curve):
    return fd.build_reference_table(study_curve, fd.standard_spec("5_50_5", seed=TABLE_SEED_50_5))


@pytest.fixture(scope="session")
def ts3_datasets(study_curve):
    """61 dates x 100 datasets x 3 measurements at sd 20."""
    return fd.generate_test_datasets(
        study_curve, STUDY_DATES, 100, sd=20.0, seed=TS3_SEED
    )


@pytest.fixture(scope="session")
def eval_rows(table_5_20_5, ts3_datasets):
    return fd.evaluate_test_series(table_5_20_5, ts3_datasets)


@pytest.fixture(scope="session")
def intcal_curve():
    """The real IntCal20 curve when the file is provided, else None."""
    path = fd.locate_intcal20()
    if path is None:
        return None
    return fd.load_curve(path, name="intcal20")


# ---------------------------------------------------------------------------
# independent oracles


def brute_median(values):
    ordered = sorted(values)
    n = len(ordered)
    if n % 2 == 1:
        return float(ordered[n // 2])
    return (ordered[n // 2 - 1] + ordered[n // 2]) / 2.0


def brute_mean(values):
    return sum(values) / len(values)


def brute_indicators(dates, means, medians):
    """Plain-Python reimplementation of the twelve indicators."""
    out = {}
    for family, values in (("CalDate", dates), ("Mean", means), ("Median", medians)):
        uniq = sorted(set(values))
        out[f"{family}_Mean"] = brute_mean(values)
        out[f"{family}_Median"] = brute_median(values)
        out[f"unique_{family}_Mean"] = brute_mean(uniq)
        out[f"unique_{family}_Median"] = brute_median(uniq)
    return out


def random_matchset(rng: np.random.Generator, max_size: int = 50) -> fd.MatchSet:
    """Random small match set with plenty of exact duplicates."""
    n_meas = int(rng.integers(1, 5))
    per = []
    measurements = []
    for i in range(n_meas):
        age = int(rng.integers(1900, 1910))
        measurements.append(fd.Measurement(age=age, sd=10.0))
        k = int(rng.integers(0, max_size // n_meas + 1))
        recs = []
        for j in range(k):
            # discrete grids force duplicate values across records
            date = float(rng.integers(-60, -40) * 5)
            recs.append(
                fd.SimRecord(
                    sim_id=int(rng.integers(1, 10_000)),
                    base_date=date,
                    age=age,
                    sd=5.0,
                    cal_mean=float(rng.integers(-230, -210)) / 2.0,
                    cal_median=float(rng.integers(-240, -220)) / 2.0,
                    cal_sigma=float(rng.integers(5, 30)),
                )
            )
        per.append(tuple(recs))
    unmatched = tuple(m.age for m, recs in zip(measurements, per) if not recs)
    return fd.MatchSet(
        measurements=tuple(measurements), per_measurement=tuple(per), unmatched=unmatched
    )
