import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcihome import localization as loc
from bcihome.controller import HomeModel
from bcihome.errors import ParseError, RssiRangeError, UnknownDeviceError, UnknownRecordError
from bcihome.localization import BeaconReading
from bcihome.ssvep import validate_frequencies

TABLE = validate_frequencies([(1, 6.0), (2, 8.2)])
LABELS = {1: "lamp", 2: "fan"}

ident = st.from_regex(r"[A-Za-z0-9_]{1,12}", fullmatch=True)
rssi = st.floats(-120.0, 0.0, allow_nan=False)
readings = st.builds(BeaconReading, ident, ident, rssi, st.integers(0, 2**53))


class TestParse:
    def test_example(self):
        r = loc.parse_reading("RSSI b1 room_a -52.5 1700000000000")
        assert r == BeaconReading("b1", "room_a", -52.5, 1700000000000)

    def test_trailing_newline(self):
        assert loc.parse_reading("RSSI b1 room_a -52.5 0\n").rssi_dbm == -52.5

    def test_not_a_number(self):
        with pytest.raises(ParseError) as exc:
            loc.parse_reading("RSSI b1 room_a notanumber 0")
        assert exc.value.offset == len("RSSI b1 room_a ")

    def test_range(self):
        with pytest.raises(RssiRangeError):
            loc.parse_reading("RSSI b2 room_b -300 0")
        with pytest.raises(RssiRangeError):
            loc.parse_reading("RSSI b2 room_b 3 0")

    @pytest.mark.parametrize("line", [
        "RSSI b1 room_a -52.5",
        "RSSI b1 room_a -52.5 0 extra",
        "RSSI b-1 room_a -52.5 0",
        "RSSI b1 room_a -52.5 -4",
        "RSSI  b1 room_a -52.5 0",
        "RSSI b1 room_a 1e-3 0",
    ])
    def test_malformed(self, line):
        with pytest.raises(ParseError):
            loc.parse_reading(line)

    def test_unknown_record_skipped_in_stream(self, caplog):
        lines = ["PING x\n", "RSSI b1 room_a -50 10\n", "\n"]
        with caplog.at_level("WARNING"):
            out = list(loc.iter_readings(lines))
        assert [r.beacon_id for r in out] == ["b1"]
        assert "unknown record" in caplog.text
        with pytest.raises(UnknownRecordError):
            loc.parse_reading("PING x")

    @settings(max_examples=300)
    @given(readings)
    def test_round_trip(self, r):
        line = loc.format_reading(r)
        assert "e" not in line.split(" ")[3].lower()
        assert loc.parse_reading(line) == r


def r(b, room, v, ts=1000):
    return BeaconReading(b, room, v, ts)


class TestResolve:
    def test_argmax(self):
        fix = loc.resolve([r("b1", "room_a", -50), r("b2", "room_b", -70)], 1500)
        assert fix.room_id == "room_a" and fix.winning_rssi == -50 and fix.readings_considered == 2

    def test_tie_smallest_beacon(self):
        fix = loc.resolve([r("b2", "room_b", -60), r("b1", "room_a", -60)], 1500)
        assert fix.room_id == "room_a"

    def test_stale(self):
        fix = loc.resolve([r("b1", "room_a", -50, 0), r("b2", "room_b", -70, 10)], 2500)
        assert fix.room_id is None and fix.readings_considered == 0

    def test_most_recent_per_beacon(self):
        fix = loc.resolve([r("b1", "room_a", -40, 100), r("b1", "room_a", -90, 900),
                           r("b2", "room_b", -60, 800)], 1000)
        assert fix.room_id == "room_b"

    def test_staleness_boundary_inclusive(self):
        assert loc.resolve([r("b1", "room_a", -50, 0)], 2000).room_id == "room_a"

    @settings(max_examples=100)
    @given(st.lists(st.builds(BeaconReading, st.sampled_from(["b1", "b2", "b3"]),
                              st.sampled_from(["room_a", "room_b"]), rssi,
                              st.integers(0, 3000)), max_size=12),
           st.randoms())
    def test_permutation_invariant(self, rs, rnd):
        shuffled = rs[:]
        rnd.shuffle(shuffled)
        assert loc.resolve(rs, 3000) == loc.resolve(shuffled, 3000)

    @settings(max_examples=100)
    @given(st.lists(readings, min_size=1, max_size=8), st.floats(0.01, 50.0), ident, ident)
    def test_weaker_reading_changes_nothing(self, rs, drop, beacon, room):
        now = max(x.timestamp_ms for x in rs)
        fix = loc.resolve(rs, now)
        if fix.room_id is None or fix.winning_rssi - drop < -120.0:
            return
        if any(x.beacon_id == beacon for x in rs):
            return  # a newer reading for an existing beacon would replace it
        extra = BeaconReading(beacon, room, fix.winning_rssi - drop, now)
        assert loc.resolve(rs + [extra], now).room_id == fix.room_id

    def test_store_snapshot(self):
        store = loc.ReadingStore()
        store.extend([r("b1", "room_a", -50, 100), r("b2", "room_b", -40, 5000)])
        assert store.resolve(1000).room_id == "room_a"
        assert store.resolve(5000).room_id == "room_b"


class TestDeviceFor:
    def test_lamp_a(self):
        home = HomeModel.build(["room_a", "room_b"], TABLE, LABELS)
        assert loc.device_for("room_a", 1, home) == "lamp_a"
        assert loc.device_for("room_b", 2, home) == "fan_b"

    def test_n_times_m(self):
        home = HomeModel.build(["room_a", "room_b", "room_c"], TABLE, LABELS)
        assert home.device_count == 6

    def test_unknown(self):
        home = HomeModel.build(["room_a", "room_b"], TABLE, LABELS)
        with pytest.raises(UnknownDeviceError):
            loc.device_for("room_z", 1, home)

    @given(st.integers(1, 6), st.integers(1, 5))
    def test_bijection(self, n_rooms, m):
        table = validate_frequencies([(k + 1, 6.0 + k) for k in range(m)])
        labels = {k + 1: f"dev{k + 1}" for k in range(m)}
        rooms = [f"room_{i}" for i in range(n_rooms)]
        home = HomeModel.build(rooms, table, labels)
        ids = {loc.device_for(rm, k, home) for rm, k in itertools.product(rooms, table.class_ids)}
        assert len(ids) == n_rooms * m == home.device_count


class TestSimulateRssi:
    def test_anchor(self):
        assert loc.simulate_rssi(1.0, noise_db=0) == -40.0
        assert loc.simulate_rssi(10.0, noise_db=0) == -65.0

    def test_deterministic(self):
        assert loc.simulate_rssi(3.0, 42) == loc.simulate_rssi(3.0, 42)

    def test_bad_distance(self):
        with pytest.raises(ValueError):
            loc.simulate_rssi(0.0)

    def test_monte_carlo_two_vs_six_metres(self):
        rng = np.random.default_rng(2024)
        correct = 0
        for i in range(10_000):
            fix = loc.resolve([r("b_a", "room_a", loc.simulate_rssi(2.0, rng), 0),
                               r("b_b", "room_b", loc.simulate_rssi(6.0, rng), 0)], 0)
            correct += fix.room_id == "room_a"
        # gap is 25*log10(3) = 11.9 dB against a 2.83 dB difference spread
        assert correct / 10_000 >= 0.99
        assert math.isclose(25 * math.log10(3), 11.928, abs_tol=1e-3)
