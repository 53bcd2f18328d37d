// Command bookkeeping for one live session: allocates strictly increasing
// seq numbers and matches ack/err replies back to the pending command.

import type { AckMsg, ClientCmd, ErrMsg } from "./protocol.js";

export type CommandOutcome =
  | { kind: "ack"; tick?: number }
  | { kind: "err"; error: string };

export type OutcomeHandler = (outcome: CommandOutcome) => void;

export class SessionView {
  private nextSeq = 1;
  private pending = new Map<number, { cmd: ClientCmd; onDone?: OutcomeHandler }>();
  role: "controller" | "observer" | null = null;
  lastError: string | null = null;

  /** Stamp a command with the next seq and record it as pending. */
  issue<T extends Omit<ClientCmd, "seq">>(cmd: T, onDone?: OutcomeHandler): T & { seq: number } {
    const seq = this.nextSeq++;
    const stamped = { ...cmd, seq } as T & { seq: number };
    this.pending.set(seq, { cmd: stamped as unknown as ClientCmd, onDone });
    return stamped;
  }

  pendingCount(): number {
    return this.pending.size;
  }

  pendingCommand(seq: number): ClientCmd | undefined {
    return this.pending.get(seq)?.cmd;
  }

  handleAck(msg: AckMsg): ClientCmd | undefined {
    const entry = this.pending.get(msg.seq);
    if (!entry) {
      return undefined;
    }
    this.pending.delete(msg.seq);
    entry.onDone?.({ kind: "ack", tick: msg.tick });
    return entry.cmd;
  }

  handleErr(msg: ErrMsg): ClientCmd | undefined {
    this.lastError = msg.error;
    if (msg.seq === null) {
      return undefined;
    }
    const entry = this.pending.get(msg.seq);
    if (!entry) {
      return undefined;
    }
    this.pending.delete(msg.seq);
    entry.onDone?.({ kind: "err", error: msg.error });
    return entry.cmd;
  }
}
