"""Simulated MCU layer: wheel speed loops, device homing, strokes.

Run:  python3 demos/low_layer.py
"""

from marvin.lowlayer import (AxisSpec, DevicePhase, DeviceState, DeviceTarget,
                             PidGains, PidState, PositioningDevice, WheelPlant,
                             microsteps_for_travel, pid_step)

print("== wheel speed loop: step to 10 rad/s on the first-order plant")
gains, state, plant = PidGains(), PidState(), WheelPlant(0.1, 1.0)
dt = 0.001
for i in range(1200):
    cmd, state = pid_step(gains, state, 10.0, plant.speed, dt)
    plant.step(cmd, dt)
    t = (i + 1) * dt
    if t in (0.05, 0.1, 0.2, 0.3, 0.5, 1.0):
        print(f"  t={t:4.2f} s  speed={plant.speed:7.4f} rad/s  "
              f"error={10 - plant.speed:+.5f}")

print("\n== microstep arithmetic (200 steps/rev x 256 microsteps, 6.35 mm screw)")
linear = AxisSpec(stroke=0.350, homing_speed=0.020, operational_speed=0.040)
for travel in (6.35, 100.0, 350.0):
    print(f"  {travel:7.2f} mm -> {microsteps_for_travel(linear, travel):>9,} microsteps")

print("\n== homing then a deploy stroke")
device = PositioningDevice(state=DeviceState(0.21, 14.0, DevicePhase.UNHOMED))
ticks = 0
while device.state.phase is not DevicePhase.READY:
    device.step(0.02)
    ticks += 1
print(f"  homed after {ticks * 0.02:.2f} s -> linear={device.state.linear_pos} m, "
      f"tilt={device.state.tilt_pos} deg, switches pressed")
device.command(DeviceTarget.DEPLOY)
ticks = 0
while device.state.phase is not DevicePhase.READY:
    device.step(0.02)
    ticks += 1
print(f"  deployed after {ticks * 0.02:.2f} s -> linear={device.state.linear_pos:.3f} m")
device.command(DeviceTarget.TILT_FORWARD)
while device.state.phase is not DevicePhase.READY:
    device.step(0.02)
print(f"  tilted forward -> {device.state.tilt_pos:.1f} deg")
