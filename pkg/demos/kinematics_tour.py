"""Mecanum kinematics tour: wheel patterns, inversion, the velocity filter.

Run:  python3 demos/kinematics_tour.py
"""

from marvin.kinematics import (ChassisParams, Twist2D, WheelSpeeds,
                               clamp_to_octahedron, forward_kinematics,
                               inverse_kinematics)

params = ChassisParams()  # r=0.05 m, l=w=0.15 m, 30 rad/s per wheel
print(f"chassis: r={params.wheel_radius} m, L={params.lever} m, "
      f"wheel limit {params.wheel_speed_max} rad/s")
print(f"speed budget |vx|+|vy|+L|w| <= {params.wheel_radius * params.wheel_speed_max} m/s\n")

print("classic wheel patterns (fl, fr, rr, rl) -> body twist:")
for label, wheels in [
    ("all equal         ", WheelSpeeds(10, 10, 10, 10)),
    ("opposite corners  ", WheelSpeeds(-10, 10, -10, 10)),
    ("same side equal   ", WheelSpeeds(-10, 10, 10, -10)),
    ("one wheel only    ", WheelSpeeds(10, 0, 0, 0)),
]:
    t = forward_kinematics(params, wheels)
    print(f"  {label} {wheels.as_tuple()} -> "
          f"vx={t.vx:+.3f} vy={t.vy:+.3f} w={t.yaw_rate:+.3f}")

print("\ninversion is exact: twist -> wheels -> twist")
twist = Twist2D(0.8, -0.3, 1.2)
wheels = inverse_kinematics(params, twist)
back = forward_kinematics(params, wheels)
print(f"  {twist} ->")
print(f"  wheels ({', '.join(f'{w:+.2f}' for w in wheels.as_tuple())}) ->")
print(f"  {back}")

print("\nthe admissible-velocity filter keeps yaw and rescales translation:")
for raw in [Twist2D(0.5, 0, 0), Twist2D(1.5, 1.5, 0),
            Twist2D(1.0, 0, 2.0), Twist2D(0, 0, 10.0)]:
    out = clamp_to_octahedron(params, raw)
    worst = inverse_kinematics(params, out).max_abs
    print(f"  ({raw.vx:+.2f}, {raw.vy:+.2f}, {raw.yaw_rate:+.2f}) -> "
          f"({out.vx:+.2f}, {out.vy:+.2f}, {out.yaw_rate:+.2f})  "
          f"max wheel {worst:.2f} rad/s")
