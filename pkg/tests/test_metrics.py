"""Metric-level aggregation: joins, filtering, merging, and the summary files."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drivemetrics.domain import (
    DriverProfile,
    MetricKind,
    RawTimestep,
    RoadAttributes,
    TripMeta,
    VehicleProfile,
)
from drivemetrics.metrics import (
    MetricKey,
    MetricTable,
    aggregate_metric,
    merge_metric_tables,
    read_metric_table,
    summary_filename,
    write_metric_table,
)
from drivemetrics.trips import summarize_trip

from conftest import build_tables, summarize_fleet
from test_trips import META, ROAD_25, ROAD_65, steps

DRIVERS = {
    "D1": DriverProfile("D1", "Male", "16-19"),
    "D2": DriverProfile("D2", "Female", "65-69"),
}
VEHICLES = {"V1": VehicleProfile("V1", "Car"), "V2": VehicleProfile("V2", "Truck")}
TRIP_INDEX = {
    "trip-1": TripMeta("trip-1", "D1", "V1"),
    "trip-2": TripMeta("trip-2", "D1", "V1"),
    "trip-3": TripMeta("trip-3", "D2", "V2"),
}


def _rows(file_id, specs):
    return summarize_trip(steps(specs), TripMeta(file_id, "", ""))


class TestAggregate:
    def test_single_row_passthrough(self):
        rows = _rows("trip-1", [(60.0, ROAD_65, {})] * 10)
        table = aggregate_metric(rows, MetricKind.SPEED, TRIP_INDEX, DRIVERS, VEHICLES)
        assert len(table.rows) == 1
        (key,) = table.rows
        assert key.driver_id == "D1" and key.gender == "Male"
        assert table.total_miles() == pytest.approx(rows[0].miles, rel=1e-12)

    def test_same_driver_two_trips_collapse(self):
        rows = _rows("trip-1", [(60.0, ROAD_65, {})] * 10) + _rows(
            "trip-2", [(60.0, ROAD_65, {})] * 4
        )
        table = aggregate_metric(rows, MetricKind.SPEED, TRIP_INDEX, DRIVERS, VEHICLES)
        assert len(table.rows) == 1
        # oracle: join-and-group over the raw per-trip rows
        expected = sum(Fraction(r.miles) for r in rows)
        assert table.total_miles() == pytest.approx(float(expected), rel=1e-12)

    def test_absent_bin_filtered_per_metric(self):
        rows = _rows("trip-1", [(60.0, ROAD_65, {"headway_s": None})] * 5)
        speed = aggregate_metric(rows, MetricKind.SPEED, TRIP_INDEX, DRIVERS, VEHICLES)
        headway = aggregate_metric(
            rows, MetricKind.HEADWAY, TRIP_INDEX, DRIVERS, VEHICLES
        )
        assert len(speed.rows) == 1
        assert len(headway.rows) == 0

    def test_unknown_metric_rejected(self):
        with pytest.raises(ValueError):
            aggregate_metric([], "ttc", TRIP_INDEX, DRIVERS, VEHICLES)

    def test_empty_store_gives_empty_table(self):
        table = aggregate_metric([], MetricKind.SPEED, TRIP_INDEX, DRIVERS, VEHICLES)
        assert table.rows == {}

    def test_unresolved_ids_become_unknown_and_are_counted(self):
        rows = _rows("trip-1", [(60.0, ROAD_65, {})] * 3)
        index = {"trip-1": TripMeta("trip-1", "ghost", "phantom")}
        table = aggregate_metric(rows, MetricKind.SPEED, index, DRIVERS, VEHICLES)
        (key,) = table.rows
        assert key.gender == "Unknown" and key.vehicle_class == "Unknown"
        assert table.unresolved_drivers == 1 and table.unresolved_vehicles == 1

    def test_missing_trip_index_entry_is_an_error(self):
        rows = _rows("nowhere", [(60.0, ROAD_65, {})])
        with pytest.raises(KeyError):
            aggregate_metric(rows, MetricKind.SPEED, TRIP_INDEX, DRIVERS, VEHICLES)


def _random_table(rng, metric=MetricKind.SPEED, n=20):
    table = MetricTable(metric)
    for _ in range(n):
        key = MetricKey(
            vehicle_id=f"V{rng.randint(1, 3)}",
            driver_id=f"D{rng.randint(1, 3)}",
            gender=rng.choice(["Male", "Female"]),
            age_range=rng.choice(["16-19", "65-69"]),
            vehicle_class=rng.choice(["Car", "Truck"]),
            functional_class=rng.choice(["2", None]),
            road_class="motorway",
            speed_category="2",
            speed_limit_mph=rng.choice([55, 65]),
            bin_index=rng.randint(0, 30),
        )
        table.add(key, Fraction(rng.randint(1, 1000), 64), rng.randint(1, 500))
    return table


class TestMerge:
    def test_identity(self):
        table = _random_table(random.Random(1))
        merged = merge_metric_tables(table, MetricTable(MetricKind.SPEED))
        assert merged.rows == table.rows

    @given(seed_a=st.integers(0, 999), seed_b=st.integers(0, 999))
    @settings(max_examples=30)
    def test_commutativity(self, seed_a, seed_b):
        a = _random_table(random.Random(seed_a))
        b = _random_table(random.Random(seed_b))
        assert merge_metric_tables(a, b).rows == merge_metric_tables(b, a).rows

    def test_metric_mismatch_rejected(self):
        with pytest.raises(ValueError):
            merge_metric_tables(
                MetricTable(MetricKind.SPEED), MetricTable(MetricKind.HEADWAY)
            )

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_sharded_merge_equals_single_pass(self, seed, small_fleet):
        """Partition trip rows into shards, aggregate each, merge in random
        order; must equal the single-pass table exactly."""
        rng = random.Random(seed)
        trip_rows = summarize_fleet(small_fleet)
        single = aggregate_metric(
            trip_rows, MetricKind.SPEED, _fleet_index(small_fleet), DRIVERS_ANY, VEHICLES_ANY
        )
        n_shards = rng.randint(2, 6)
        shards = [[] for _ in range(n_shards)]
        for row in trip_rows:
            shards[rng.randrange(n_shards)].append(row)
        partials = [
            aggregate_metric(
                s, MetricKind.SPEED, _fleet_index(small_fleet), DRIVERS_ANY, VEHICLES_ANY
            )
            for s in shards
        ]
        rng.shuffle(partials)
        merged = partials[0]
        for p in partials[1:]:
            merged = merge_metric_tables(merged, p)
        assert merged.rows == single.rows


# fleet-backed rosters are loaded lazily so hypothesis examples stay cheap
DRIVERS_ANY: dict = {}
VEHICLES_ANY: dict = {}
_INDEX_CACHE: dict = {}


def _fleet_index(fleet):
    if not _INDEX_CACHE:
        from drivemetrics.metrics import (
            read_driver_roster,
            read_trip_index,
            read_vehicle_roster,
        )

        _INDEX_CACHE["index"] = read_trip_index(fleet.out_dir / "trip_index.csv")
        DRIVERS_ANY.update(read_driver_roster(fleet.out_dir / "drivers.csv"))
        VEHICLES_ANY.update(read_vehicle_roster(fleet.out_dir / "vehicles.csv"))
    return _INDEX_CACHE["index"]


class TestConservationAndCardinality:
    def test_mile_conservation_per_metric(self, small_fleet, small_tables):
        trip_rows = summarize_fleet(small_fleet)
        bin_fields = {
            MetricKind.SPEED: "speed_bin",
            MetricKind.SPEEDING: "speeding_bin",
            MetricKind.HEADWAY: "headway_bin",
            MetricKind.FOLLOWING_DISTANCE: "following_bin",
            MetricKind.LANE_POSITION: "lane_bin",
        }
        for metric, table in small_tables.items():
            expected = sum(
                Fraction(r.miles)
                for r in trip_rows
                if getattr(r, bin_fields[metric]) is not None
            )
            assert table.total_miles() == pytest.approx(float(expected), rel=1e-9)

    def test_duplicating_trips_keeps_keys_and_doubles_measures(self, small_fleet):
        trip_rows = summarize_fleet(small_fleet)
        index = dict(_fleet_index(small_fleet))
        # duplicates: same content, fresh file_ids mapped to the same meta
        dup_rows = list(trip_rows)
        for row in trip_rows:
            new_id = row.file_id + "-dup"
            if new_id not in index:
                meta = index[row.file_id]
                index[new_id] = TripMeta(new_id, meta.driver_id, meta.vehicle_id)
            dup_rows.append(
                type(row)(
                    file_id=new_id,
                    road=row.road,
                    speed_bin=row.speed_bin,
                    speeding_bin=row.speeding_bin,
                    lane_bin=row.lane_bin,
                    headway_bin=row.headway_bin,
                    following_bin=row.following_bin,
                    miles=row.miles,
                    time_tenths=row.time_tenths,
                )
            )
        for metric in MetricKind:
            base = aggregate_metric(trip_rows, metric, index, DRIVERS_ANY, VEHICLES_ANY)
            doubled = aggregate_metric(dup_rows, metric, index, DRIVERS_ANY, VEHICLES_ANY)
            assert set(doubled.rows) == set(base.rows)
            for key, (miles, tenths) in base.rows.items():
                assert doubled.rows[key] == (2 * miles, 2 * tenths)

    def test_cardinality_bound(self, small_tables):
        for metric, table in small_tables.items():
            keys = list(table.rows)
            n_drivers = len({k.driver_id for k in keys})
            bound = (
                n_drivers
                * len({k.vehicle_class for k in keys})
                * len({k.functional_class for k in keys})
                * len({k.road_class for k in keys})
                * len({k.speed_category for k in keys})
                * len({k.speed_limit_mph for k in keys})
                * len({k.bin_index for k in keys})
            )
            assert len(keys) <= bound


class TestSummaryFiles:
    def test_round_trip(self, tmp_path, small_tables):
        for metric, table in small_tables.items():
            path = tmp_path / summary_filename(metric)
            write_metric_table(table, path)
            loaded = read_metric_table(path, metric)
            assert set(loaded.rows) == set(table.rows)
            for key, (miles, tenths) in table.rows.items():
                got_miles, got_tenths = loaded.rows[key]
                assert float(got_miles) == float(miles)
                assert got_tenths == tenths

    def test_write_is_deterministic(self, tmp_path, small_tables):
        table = small_tables[MetricKind.SPEED]
        write_metric_table(table, tmp_path / "a.summary")
        write_metric_table(table, tmp_path / "b.summary")
        assert (tmp_path / "a.summary").read_bytes() == (
            tmp_path / "b.summary"
        ).read_bytes()

    def test_filenames(self):
        assert summary_filename(MetricKind.FOLLOWING_DISTANCE) == (
            "following_distance.summary"
        )
