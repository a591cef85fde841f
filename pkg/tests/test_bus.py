import pytest

from marvin.bus import Bus, EstopLatch, SchemaError, arbitrate_velocity
from marvin.kinematics import Twist2D
from marvin.messages import ActionKind, ActionRequest, Source, VelocityCommand


def manual(twist, stamp):
    return VelocityCommand(twist, Source.MANUAL, stamp)


def auto(twist, stamp):
    return VelocityCommand(twist, Source.AUTONOMOUS, stamp)


class TestPubSub:
    def test_subscriber_before_publish_receives(self):
        bus = Bus()
        sub = bus.subscribe("events")
        from marvin.messages import Event
        bus.publish("events", Event("hello", 0.0), publisher="a", stamp=0.0)
        env = sub.poll()
        assert env is not None and env.payload.name == "hello"
        assert sub.poll() is None

    def test_per_publisher_fifo_order(self):
        bus = Bus()
        sub = bus.subscribe("events")
        from marvin.messages import Event
        for i in range(5):
            bus.publish("events", Event(f"a{i}", 0.0), publisher="a")
            bus.publish("events", Event(f"b{i}", 0.0), publisher="b")
        seqs = {"a": 0, "b": 0}
        for env in sub.drain():
            assert env.seq == seqs[env.publisher] + 1
            seqs[env.publisher] = env.seq
        assert seqs == {"a": 5, "b": 5}

    def test_wrong_payload_type(self):
        bus = Bus()
        with pytest.raises(SchemaError):
            bus.publish("events", "not an event")

    def test_unknown_topic(self):
        bus = Bus()
        with pytest.raises(KeyError):
            bus.publish("nope", object())
        with pytest.raises(KeyError):
            bus.subscribe("nope")

    def test_drop_oldest_on_overflow(self):
        bus = Bus(queue_depth=4)
        sub = bus.subscribe("events")
        from marvin.messages import Event
        for i in range(10):
            bus.publish("events", Event(str(i), 0.0), publisher="p")
        got = [env.payload.name for env in sub.drain()]
        assert got == ["6", "7", "8", "9"]

    def test_fanout_to_all_subscribers(self):
        bus = Bus()
        subs = [bus.subscribe("events") for _ in range(3)]
        from marvin.messages import Event
        bus.publish("events", Event("x", 0.0))
        assert all(s.poll().payload.name == "x" for s in subs)


class TestArbitration:
    def test_auto_only(self):
        t = Twist2D(0.4, 0, 0)
        out = arbitrate_velocity(None, auto(t, 1.0), False, now=1.1)
        assert out == t

    def test_manual_wins_over_auto(self):
        m, a = Twist2D(0.1, 0, 0), Twist2D(0.9, 0, 0)
        out = arbitrate_velocity(manual(m, 1.0), auto(a, 1.0), False, now=1.1)
        assert out == m

    def test_estop_overrides_everything(self):
        m, a = Twist2D(0.1, 0, 0), Twist2D(0.9, 0, 0)
        out = arbitrate_velocity(manual(m, 1.0), auto(a, 1.0), True, now=1.0)
        assert out == Twist2D(0, 0, 0)

    def test_stale_manual_falls_back_to_auto(self):
        m, a = Twist2D(0.1, 0, 0), Twist2D(0.9, 0, 0)
        out = arbitrate_velocity(manual(m, 0.0), auto(a, 1.0), False, now=1.0)
        assert out == a

    def test_everything_stale_gives_zero(self):
        m, a = Twist2D(0.1, 0, 0), Twist2D(0.9, 0, 0)
        out = arbitrate_velocity(manual(m, 0.0), auto(a, 0.0), False, now=5.0)
        assert out == Twist2D(0, 0, 0)

    def test_manual_priority_every_interleaving(self):
        # manual must win for any fresh manual/auto stamp combination
        m, a = Twist2D(0.2, 0.1, 0), Twist2D(-0.5, 0, 1.0)
        for m_age in (0.0, 0.2, 0.49):
            for a_age in (0.0, 0.2, 0.49):
                out = arbitrate_velocity(manual(m, 1.0 - m_age),
                                         auto(a, 1.0 - a_age), False, now=1.0)
                assert out == m


class TestEstopLatch:
    def test_set_and_query(self):
        latch = EstopLatch()
        assert latch.latched is False
        latch.set()
        assert latch.latched is True

    def test_idempotent_set(self):
        bus = Bus()
        sub = bus.subscribe("actions")
        latch = EstopLatch(bus)
        latch.set(1.0)
        latch.set(1.1)
        msgs = sub.drain()
        assert len(msgs) == 1  # Stop action published once per latch
        assert msgs[0].payload.kind is ActionKind.STOP

    def test_reset_reenables(self):
        latch = EstopLatch()
        latch.set()
        t = Twist2D(0.3, 0, 0)
        assert arbitrate_velocity(None, auto(t, 1.0), latch.latched, 1.0) == Twist2D(0, 0, 0)
        latch.reset()
        assert arbitrate_velocity(None, auto(t, 1.0), latch.latched, 1.0) == t
