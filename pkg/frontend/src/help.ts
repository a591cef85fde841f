// Help-confirmation dialog logic: opens on the prompt event, shows a live
// countdown, publishes exactly one reply, and closes itself when the task
// manager resolves the request (dispatch, denial or abort).

import { helpReply, type Command } from "./messages.js";
import type { EventMsg } from "./protocol.js";

export type HelpDialogState = "closed" | "open" | "resolved";

export class HelpDialog {
  state: HelpDialogState = "closed";
  deadline = 0;
  issuedAt = 0;
  resolution = "";
  private replied = false;

  constructor(private publish: (cmd: Command) => void) {}

  onEvent(event: EventMsg): void {
    if (event.name === "HelpPromptIssued") {
      this.state = "open";
      this.replied = false;
      this.issuedAt = event.stamp;
      this.deadline = Number(event.data["deadline"] ?? event.stamp + 10);
      this.resolution = "";
    } else if (event.name === "HelpDispatched") {
      if (this.state === "open") this.resolution = "dispatched";
      this.state = this.state === "open" ? "resolved" : this.state;
    } else if (event.name === "HelpDenied") {
      if (this.state === "open") this.resolution = "denied";
      this.state = this.state === "open" ? "resolved" : this.state;
    }
  }

  /** Whole seconds left on the visible countdown. */
  countdown(now: number): number {
    return Math.max(0, Math.ceil(this.deadline - now));
  }

  confirm(): boolean {
    if (this.state !== "open" || this.replied) return false;
    this.replied = true;
    this.publish(helpReply(true));
    return true;
  }

  deny(): boolean {
    if (this.state !== "open" || this.replied) return false;
    this.replied = true;
    this.publish(helpReply(false));
    return true;
  }

  acknowledge(): void {
    if (this.state === "resolved") this.state = "closed";
  }
}
