"""Hand-built metric tables with known per-cohort percentage structure.

These small tables encode cohort totals and per-bin percentages directly, so
query results over them have exactly known values. They back the golden
query tests and double as demo data for the analytics service and UI.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from drivemetrics.domain import MetricKind
from drivemetrics.metrics import (
    MetricKey,
    MetricTable,
    summary_filename,
    write_metric_table,
)


def add_cohort(
    table: MetricTable,
    *,
    driver_id: str,
    vehicle_id: str,
    gender: str,
    age_range: str,
    vehicle_class: str,
    speed_limit_mph: int,
    total_miles: int,
    bin_percents: dict[int, str],
    remainder_bin: int,
    functional_class: str = "2",
    road_class: str = "motorway",
    speed_category: str = "2",
    mean_speed_mph: float = 60.0,
) -> None:
    """Add one cohort's rows: exact per-bin percentages of an exact total.

    ``bin_percents`` maps bin index to a decimal percentage string; whatever
    is left of 100% lands in ``remainder_bin``. Time is derived from miles at
    the cohort's mean speed, rounded to tenths of a second.
    """
    percents = {k: Fraction(p) for k, p in bin_percents.items()}
    remainder = Fraction(100) - sum(percents.values())
    if remainder < 0:
        raise ValueError("bin percentages exceed 100")
    if remainder > 0:
        percents[remainder_bin] = percents.get(remainder_bin, Fraction(0)) + remainder
    for bin_index, pct in sorted(percents.items()):
        if pct == 0:
            continue
        miles = Fraction(total_miles) * pct / 100
        tenths = max(1, round(float(miles) / mean_speed_mph * 36000))
        key = MetricKey(
            vehicle_id=vehicle_id,
            driver_id=driver_id,
            gender=gender,
            age_range=age_range,
            vehicle_class=vehicle_class,
            functional_class=functional_class,
            road_class=road_class,
            speed_category=speed_category,
            speed_limit_mph=speed_limit_mph,
            bin_index=bin_index,
        )
        table.add(key, miles, tenths)


def speeding_gender_table() -> MetricTable:
    """Speeding table with gendered 16-19 cohorts on 65-mph roads.

    The male cohort holds 161,000 miles and the female cohort 154,000 miles;
    their per-bin percentages over [0-2.5) .. [12.5-15.0) are fixed, with the
    rest of each cohort's miles below the limit. Distractor cohorts on other
    ages/limits exercise the filters.
    """
    table = MetricTable(MetricKind.SPEEDING)
    add_cohort(
        table,
        driver_id="GM01",
        vehicle_id="GV01",
        gender="Male",
        age_range="16-19",
        vehicle_class="Car",
        speed_limit_mph=65,
        total_miles=161000,
        bin_percents={
            0: "10.17",
            1: "18.75",
            2: "20.89",
            3: "13.45",
            4: "9.19",
            5: "5.01",
        },
        remainder_bin=-1,
    )
    add_cohort(
        table,
        driver_id="GF01",
        vehicle_id="GV02",
        gender="Female",
        age_range="16-19",
        vehicle_class="SUV-Crossover",
        speed_limit_mph=65,
        total_miles=154000,
        bin_percents={
            0: "10.79",
            1: "15.63",
            2: "18.44",
            3: "16.52",
            4: "9.49",
            5: "5.57",
        },
        remainder_bin=-1,
    )
    # distractors outside the 16-19 / 65-mph selection
    add_cohort(
        table,
        driver_id="GX01",
        vehicle_id="GV03",
        gender="Male",
        age_range="35-39",
        vehicle_class="Truck",
        speed_limit_mph=55,
        total_miles=50000,
        bin_percents={0: "40", 1: "20"},
        remainder_bin=-2,
    )
    return table


def headway_age_table() -> MetricTable:
    """Headway table with 16-19 and 65-69 cohorts on 65-mph roads.

    78,000 and 44,000 miles respectively; per-bin percentages fixed over
    [0-0.25) .. [1.75-2.0) with the remainder at longer headways.
    """
    table = MetricTable(MetricKind.HEADWAY)
    add_cohort(
        table,
        driver_id="HY01",
        vehicle_id="HV01",
        gender="Female",
        age_range="16-19",
        vehicle_class="Car",
        speed_limit_mph=65,
        total_miles=78000,
        bin_percents={
            0: "0.23",
            1: "3.23",
            2: "9.46",
            3: "12.45",
            4: "12.13",
            5: "10.16",
            6: "8.32",
            7: "6.92",
        },
        remainder_bin=9,
    )
    add_cohort(
        table,
        driver_id="HO01",
        vehicle_id="HV02",
        gender="Male",
        age_range="65-69",
        vehicle_class="Minivan",
        speed_limit_mph=65,
        total_miles=44000,
        bin_percents={
            0: "0.07",
            1: "0.81",
            2: "3.62",
            3: "6.94",
            4: "8.91",
            5: "9.24",
            6: "8.67",
            7: "8.07",
        },
        remainder_bin=9,
    )
    add_cohort(
        table,
        driver_id="HX01",
        vehicle_id="HV03",
        gender="Female",
        age_range="40-44",
        vehicle_class="Car",
        speed_limit_mph=55,
        total_miles=30000,
        bin_percents={4: "25", 5: "25"},
        remainder_bin=10,
    )
    return table


def write_golden_tables(data_dir) -> list[Path]:
    """Write the golden tables as <metric>.summary files for serving."""
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for table in (speeding_gender_table(), headway_age_table()):
        path = data_dir / summary_filename(table.metric)
        write_metric_table(table, path)
        written.append(path)
    return written
