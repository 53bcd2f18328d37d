// Editable agent roster with optimistic updates: edits apply to the local
// view immediately and are reverted if the server rejects the command.

import type { AgentDesc, SetAgentCmd } from "./protocol.js";

export interface AgentEdit {
  period?: number;
  step_bound?: number;
  enabled?: boolean;
}

export class AgentPanel {
  private agents = new Map<string, AgentDesc>();
  // seq -> pre-edit copy, restored on err
  private reverts = new Map<number, AgentDesc>();

  syncFromSnapshot(agents: AgentDesc[]): void {
    this.agents = new Map(agents.map((a) => [a.id, { ...a }]));
  }

  list(): AgentDesc[] {
    return [...this.agents.values()];
  }

  get(id: string): AgentDesc | undefined {
    return this.agents.get(id);
  }

  /**
   * Apply an edit optimistically and return the command body to send
   * (without seq). Returns null for unknown agents or empty edits.
   */
  beginEdit(id: string, edit: AgentEdit): Omit<SetAgentCmd, "seq"> | null {
    const current = this.agents.get(id);
    if (!current || Object.keys(edit).length === 0) {
      return null;
    }
    this.agents.set(id, { ...current, ...edit });
    return { type: "set_agent", id, ...edit };
  }

  /** Remember the pre-edit state under the command's seq. */
  trackPending(seq: number, before: AgentDesc): void {
    this.reverts.set(seq, before);
  }

  commit(seq: number): void {
    this.reverts.delete(seq);
  }

  revert(seq: number): void {
    const before = this.reverts.get(seq);
    if (before) {
      this.agents.set(before.id, before);
      this.reverts.delete(seq);
    }
  }
}
