"""Triplet pairing, time extraction, timelines, and resolution counting."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from fcnsim import (
    ClockMismatch,
    Engine,
    EventKind,
    NoClockPulse,
    RunConfig,
    SimEvent,
    StandardClockSpec,
    TimeLabel,
    TripletState,
    build_timeline,
    clock_pulses,
    extract_time,
    form_triplet,
    label_absorptions,
    pulses_from_trace,
    resolution_report,
)
from helpers import chain_network


def absorption_at(event_id: int, t: float, node: int = 1, parents=frozenset()) -> SimEvent:
    return SimEvent(
        id=event_id,
        kind=EventKind.ABSORPTION,
        node=node,
        engine_time=t,
        parents=frozenset(parents),
        payload={"arc": 1, "energy_ev": 1.5, "excitation_id": event_id},
    )


def unit_clock(period: float = 1.0, first: float = 0.0, counter: int = 0, node: int = 9):
    return StandardClockSpec(id=node, period_s=period, first_tick_s=first, counter_start=counter)


@pytest.fixture
def chain_trace(chain):
    net, injections = chain
    return Engine(net, RunConfig(run_until_s=5.0), injections).run()


class TestFormTriplet:
    def test_floor_pairing(self):
        pulses = clock_pulses(unit_clock(), until_s=5.0)
        triplet = form_triplet(absorption_at(10, 2.3), pulses)
        assert triplet.label == 2
        assert triplet.signal_state == 10

    def test_arrival_on_tick_pairs_with_that_tick(self):
        pulses = clock_pulses(unit_clock(), until_s=5.0)
        assert form_triplet(absorption_at(10, 3.0), pulses).label == 3

    def test_absorption_before_first_pulse(self):
        pulses = clock_pulses(unit_clock(first=1.0), until_s=5.0)
        with pytest.raises(NoClockPulse):
            form_triplet(absorption_at(10, 0.5), pulses)

    def test_empty_pulse_history(self):
        with pytest.raises(NoClockPulse):
            form_triplet(absorption_at(10, 0.5), ())

    def test_rejects_non_absorption(self):
        tick = SimEvent(
            id=0, kind=EventKind.CLOCK_TICK, node=9, engine_time=0.0,
            parents=frozenset(), payload={"pulse_id": 0, "counter": 0},
        )
        with pytest.raises(ValueError):
            form_triplet(tick, clock_pulses(unit_clock(), until_s=5.0))

    @given(
        st.floats(min_value=0.0, max_value=100.0, allow_nan=False),
        st.sampled_from([0.0625, 0.125, 0.25, 0.5, 1.0, 2.0]),
    )
    def test_matches_linear_scan(self, t, period):
        """The bisect pairing agrees with a brute-force scan of the pulses."""
        pulses = clock_pulses(unit_clock(period=period), until_s=101.0)
        expected = max((p for p in pulses if p.engine_time <= t), key=lambda p: p.engine_time)
        assert form_triplet(absorption_at(1, t), pulses).pulse == expected.id


class TestExtractTime:
    def test_unit_period(self):
        triplet = TripletState(signal_state=1, pulse=2, label=2, clock=9)
        label = extract_time(triplet, unit_clock())
        assert label.time_number_s == 2.0

    def test_offset_clock(self):
        triplet = TripletState(signal_state=1, pulse=2, label=2, clock=9)
        label = extract_time(triplet, unit_clock(period=0.5, first=0.25))
        assert label.time_number_s == 1.25

    def test_counter_start_offsets_label(self):
        triplet = TripletState(signal_state=1, pulse=0, label=7, clock=9)
        label = extract_time(triplet, unit_clock(counter=5))
        assert label.time_number_s == 2.0

    def test_wrong_clock_rejected(self):
        triplet = TripletState(signal_state=1, pulse=2, label=2, clock=9)
        with pytest.raises(ClockMismatch):
            extract_time(triplet, unit_clock(node=8))

    def test_time_number_equals_pulse_time(self):
        """Extraction reproduces the paired pulse's engine time bitwise."""
        clock = unit_clock(period=0.25, first=0.125)
        pulses = clock_pulses(clock, until_s=20.0)
        for t in (0.125, 3.3, 7.77, 19.9):
            triplet = form_triplet(absorption_at(1, t), pulses)
            paired = next(p for p in pulses if p.id == triplet.pulse)
            assert extract_time(triplet, clock).time_number_s == paired.engine_time


class TestBuildTimeline:
    def test_empty(self):
        timeline, violations = build_timeline([], ())
        assert timeline.entries == ()
        assert violations == ()

    def test_chain_fixture_labels(self, chain_trace):
        clock = chain_network()[0].clocks[0]
        labels, skipped = label_absorptions(chain_trace, clock)
        timeline, violations = build_timeline(labels, chain_trace)
        assert [lb.time_number_s for lb in timeline.entries] == [1.0, 3.0]
        assert skipped == 0
        assert violations == ()
        assert timeline.observer == 3

    def test_entries_sorted_by_time_then_event(self):
        trace = (absorption_at(5, 1.0), absorption_at(3, 1.0))
        labels = [
            TimeLabel(event=5, time_number_s=1.0, triplet=TripletState(5, 1, 1, clock=9)),
            TimeLabel(event=3, time_number_s=1.0, triplet=TripletState(3, 1, 1, clock=9)),
        ]
        timeline, _ = build_timeline(labels, trace)
        assert [lb.event for lb in timeline.entries] == [3, 5]

    def test_inverted_label_reported(self):
        parent = absorption_at(1, 1.0)
        child = absorption_at(2, 2.0, parents={1})
        labels = [
            TimeLabel(event=1, time_number_s=5.0, triplet=TripletState(1, 5, 5, clock=9)),
            TimeLabel(event=2, time_number_s=1.0, triplet=TripletState(2, 1, 1, clock=9)),
        ]
        timeline, violations = build_timeline(labels, (parent, child))
        assert len(violations) == 1
        assert violations[0].ancestor == 1 and violations[0].descendant == 2

    def test_equal_labels_are_not_violations(self):
        parent = absorption_at(1, 1.0)
        child = absorption_at(2, 1.2, parents={1})
        labels = [
            TimeLabel(event=1, time_number_s=1.0, triplet=TripletState(1, 1, 1, clock=9)),
            TimeLabel(event=2, time_number_s=1.0, triplet=TripletState(2, 1, 1, clock=9)),
        ]
        _, violations = build_timeline(labels, (parent, child))
        assert violations == ()

    def test_mixed_clocks_rejected(self):
        labels = [
            TimeLabel(event=1, time_number_s=1.0, triplet=TripletState(1, 1, 1, clock=9)),
            TimeLabel(event=2, time_number_s=2.0, triplet=TripletState(2, 2, 2, clock=8)),
        ]
        with pytest.raises(ClockMismatch):
            build_timeline(labels, ())

    def test_ancestry_is_transitive(self):
        a = absorption_at(1, 1.0)
        mid = SimEvent(
            id=2, kind=EventKind.EMISSION, node=1, engine_time=1.0,
            parents=frozenset({1}), payload={},
        )
        b = absorption_at(3, 2.0, parents={2})
        labels = [
            TimeLabel(event=1, time_number_s=4.0, triplet=TripletState(1, 4, 4, clock=9)),
            TimeLabel(event=3, time_number_s=2.0, triplet=TripletState(3, 2, 2, clock=9)),
        ]
        _, violations = build_timeline(labels, (a, mid, b))
        assert len(violations) == 1


class TestResolutionReport:
    def test_coarse_clock_cannot_separate_the_chain(self, chain_trace):
        coarse = unit_clock(period=10.0, node=3)
        labels, _ = label_absorptions(chain_trace, coarse, clock_pulses(coarse, until_s=5.0))
        timeline, _ = build_timeline(labels, chain_trace)
        report = resolution_report(timeline, chain_trace)
        assert report.causally_ordered_pairs == 1
        assert report.indistinguishable_pairs == 1

    def test_fine_clock_separates_the_chain(self, chain_trace):
        fine = unit_clock(period=0.1, node=3)
        labels, _ = label_absorptions(chain_trace, fine, clock_pulses(fine, until_s=5.0))
        timeline, _ = build_timeline(labels, chain_trace)
        report = resolution_report(timeline, chain_trace)
        assert report.indistinguishable_pairs == 0
        assert report.causally_ordered_pairs == 1

    def test_empty_timeline_zero_counts(self):
        timeline, _ = build_timeline([], ())
        report = resolution_report(timeline, ())
        assert report.causally_ordered_pairs == 0
        assert report.indistinguishable_pairs == 0
        assert report.distinct_labels == 0


class TestLabelAbsorptions:
    def test_skips_absorptions_before_first_pulse(self, chain_trace):
        late = unit_clock(period=1.0, first=2.0, node=3)
        labels, skipped = label_absorptions(chain_trace, late, clock_pulses(late, until_s=5.0))
        assert skipped == 1  # the absorption at 1.5 precedes the first pulse
        assert [lb.time_number_s for lb in labels] == [3.0]

    def test_default_pulse_source_is_the_trace(self, chain_trace):
        clock = chain_network()[0].clocks[0]
        explicit, _ = label_absorptions(chain_trace, clock, pulses_from_trace(chain_trace, 3))
        implicit, _ = label_absorptions(chain_trace, clock)
        assert explicit == implicit


class TestPulseHelpers:
    def test_pulses_from_trace(self, chain_trace):
        pulses = pulses_from_trace(chain_trace, 3)
        assert [p.engine_time for p in pulses] == [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]
        assert [p.counter for p in pulses] == [0, 1, 2, 3, 4, 5]

    def test_consecutive_pulses_differ_by_the_period(self, chain_trace):
        pulses = pulses_from_trace(chain_trace, 3)
        for prev, cur in zip(pulses, pulses[1:]):
            assert cur.engine_time - prev.engine_time == 1.0
            assert cur.counter - prev.counter == 1

    def test_synthetic_pulses_match_trace_pulses(self, chain_trace):
        clock = chain_network()[0].clocks[0]
        synthetic = clock_pulses(clock, until_s=5.0)
        recorded = pulses_from_trace(chain_trace, 3)
        assert [p.engine_time for p in synthetic] == [p.engine_time for p in recorded]
        assert [p.counter for p in synthetic] == [p.counter for p in recorded]
