// Virtual joystick: pointer drags map to a twist, published at 20 Hz
// while engaged. Releasing sends a final zero twist.

import { manualVelocity, type Command } from "./messages.js";

const PUBLISH_PERIOD_MS = 50; // 20 Hz

export interface JoystickState {
  engaged: boolean;
  vx: number;
  vy: number;
  yawRate: number;
}

export class VirtualJoystick {
  state: JoystickState = { engaged: false, vx: 0, vy: 0, yawRate: 0 };
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private publish: (cmd: Command) => void,
    private vMax = 1.0,
    private wMax = 1.5,
  ) {}

  /** nx, ny in [-1, 1]: forward/left deflection; spin in [-1, 1]. */
  engage(nx: number, ny: number, spin = 0): void {
    this.state = {
      engaged: true,
      vx: nx * this.vMax,
      vy: ny * this.vMax,
      yawRate: spin * this.wMax,
    };
    if (this.timer === null) {
      this.emit();
      this.timer = setInterval(() => this.emit(), PUBLISH_PERIOD_MS);
    }
  }

  release(): void {
    if (!this.state.engaged) return;
    this.state = { engaged: false, vx: 0, vy: 0, yawRate: 0 };
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    this.publish(manualVelocity(0, 0, 0));
  }

  private emit(): void {
    this.publish(manualVelocity(this.state.vx, this.state.vy, this.state.yawRate));
  }
}
