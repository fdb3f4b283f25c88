// Scenario draft: an ordered edit list that always serializes to the
// service's Scenario JSON. Edits are keyed so that re-committing the
// same control replaces its previous value instead of appending.

import { Edit, ModelJson, StateKeyJson, keyLabel, sameKey } from "./types.js";

export class ScenarioDraft {
  private edits: Edit[] = [];

  private slot(edit: Edit): string {
    switch (edit.op) {
      case "set_probability":
        return `p:${keyLabel(edit.from)}->${keyLabel(edit.to)}`;
      case "scale_state_mean":
        return `s:${keyLabel(edit.state)}`;
      case "set_edge_mean":
        return `m:${keyLabel(edit.from)}->${keyLabel(edit.to)}`;
    }
  }

  upsert(edit: Edit): void {
    if (edit.op === "set_probability" && (edit.value < 0 || edit.value > 1)) {
      throw new Error(`probability ${edit.value} outside [0, 1]`);
    }
    if (edit.op === "scale_state_mean" && edit.factor <= 0) {
      throw new Error(`scale factor must be positive, got ${edit.factor}`);
    }
    const slot = this.slot(edit);
    const existing = this.edits.findIndex((e) => this.slot(e) === slot);
    if (existing >= 0) {
      this.edits[existing] = edit;
    } else {
      this.edits.push(edit);
    }
  }

  remove(edit: Edit): void {
    const slot = this.slot(edit);
    this.edits = this.edits.filter((e) => this.slot(e) !== slot);
  }

  reset(): void {
    this.edits = [];
  }

  isEmpty(): boolean {
    return this.edits.length === 0;
  }

  list(): readonly Edit[] {
    return this.edits;
  }

  toJson(full = false): { edits: Edit[]; full?: boolean } {
    const body: { edits: Edit[]; full?: boolean } = { edits: [...this.edits] };
    if (full) body.full = true;
    return body;
  }
}

export interface SiblingPreview {
  to: StateKeyJson;
  p: number;
  provisional: boolean;
}

/** Optimistic preview of the proportional sibling rebalance the service
 * will apply; every entry is provisional until the response lands. */
export function previewRebalance(
  model: ModelJson,
  from: StateKeyJson,
  to: StateKeyJson,
  value: number,
): SiblingPreview[] {
  const fromState = model.states.find((s) => sameKey(s.key, from));
  if (!fromState) throw new Error(`unknown state ${keyLabel(from)}`);
  const row = model.edges.filter((e) => e.from === fromState.id);
  const target = row.find((e) => sameKey(model.states[e.to].key, to));
  if (!target) throw new Error(`unknown edge ${keyLabel(from)} -> ${keyLabel(to)}`);

  const siblingMass = row
    .filter((e) => e !== target)
    .reduce((acc, e) => acc + e.p, 0);
  return row.map((e) => {
    if (e === target) {
      return { to: model.states[e.to].key, p: value, provisional: true };
    }
    const p = siblingMass === 0 ? 0 : (e.p * (1 - value)) / siblingMass;
    return { to: model.states[e.to].key, p, provisional: true };
  });
}
