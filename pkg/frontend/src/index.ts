/**
 * Scripting bindings for fastmobius information decomposition.
 *
 * Everything is computed by the core engine behind the CLI; this package
 * only marshals inputs into its JSON/CSV interfaces and parses the results.
 * Calls are stateless apart from a per-process cache of generated matrix
 * files keyed by source count.
 */

import {
  CapacityError,
  DataError,
  UsageError,
  ensureMatrixFile,
  runCli,
  withScratchDir,
  writeScratch,
} from "./runner.js";

export { CapacityError, DataError, UsageError };

export type Measure = "min" | "mmi";

/** Mirror of the engine's joint distribution: flat pmf, sources varying fastest. */
export interface BoundDistribution {
  sourceArities: number[];
  targetArities: number[];
  pmf: number[] | Float64Array;
}

export type CanonicalName = "uniform" | "xor" | "unq" | "red";

/** One observed transition: k source symbols, then k target symbols. */
export type TransitionPair = [number[], number[]];

function stateOf(flat: number, arities: number[]): number[] {
  const state: number[] = [];
  let rest = flat;
  for (const a of arities) {
    state.push(rest % a);
    rest = Math.floor(rest / a);
  }
  return state;
}

function distributionJson(dist: BoundDistribution): string {
  const arities = [...dist.sourceArities, ...dist.targetArities];
  const cells = arities.reduce((a, b) => a * b, 1);
  const pmf = Array.from(dist.pmf);
  if (pmf.length !== cells) {
    throw new DataError(`pmf has ${pmf.length} entries but arities imply ${cells}`);
  }
  const states = [];
  for (let i = 0; i < cells; i++) {
    if (pmf[i] !== 0) states.push({ state: stateOf(i, arities), p: pmf[i] });
  }
  return JSON.stringify({
    source_arities: dist.sourceArities,
    target_arities: dist.targetArities,
    pmf: states,
  });
}

/**
 * The four benchmark distributions on n binary sources and a binary target,
 * as literal pmf data (the decomposition math stays in the engine).
 */
export function canonicalDistribution(name: CanonicalName, n = 5): BoundDistribution {
  const cells = 1 << (n + 1);
  const pmf = new Float64Array(cells);
  for (let i = 0; i < cells; i++) {
    const bits = stateOf(i, Array(n + 1).fill(2));
    const xs = bits.slice(0, n);
    const y = bits[n];
    switch (name) {
      case "uniform":
        pmf[i] = 1 / cells;
        break;
      case "xor":
        pmf[i] = xs.reduce((a, b) => a + b, 0) % 2 === y ? 1 / (cells / 2) : 0;
        break;
      case "unq":
        pmf[i] = xs[0] === y ? 1 / (cells / 2) : 0;
        break;
      case "red":
        pmf[i] = xs.every((x) => x === y) ? 0.5 : 0;
        break;
    }
  }
  return { sourceArities: Array(n).fill(2), targetArities: [2], pmf };
}

interface PidAtomRow {
  antichain: string;
  redundancy: number;
  atom: number;
}

function pidJson(dist: BoundDistribution, measure: Measure): { atoms: PidAtomRow[] } {
  const n = dist.sourceArities.length;
  if (n > 5) throw new CapacityError(`n=${n} sources unsupported`);
  return withScratchDir((dir) => {
    const distPath = writeScratch(dir, "dist.json", distributionJson(dist));
    const args = ["pid", "--dist", distPath, "--measure", measure, "--format", "json"];
    if (n === 5) args.push("--matrix", ensureMatrixFile(5));
    return JSON.parse(runCli(args));
  });
}

/**
 * Full decomposition: every (antichain, atom value) pair in the engine's
 * canonical lattice order.
 */
export function pid(dist: BoundDistribution, measure: Measure = "mmi"): Array<[string, number]> {
  return pidJson(dist, measure).atoms.map((a) => [a.antichain, a.atom]);
}

/** Redundancies alongside the atoms, for callers that want both. */
export function pidDetailed(dist: BoundDistribution, measure: Measure = "mmi"): PidAtomRow[] {
  return pidJson(dist, measure).atoms;
}

/** Top synergy atom via the inclusion-exclusion shortcut (2^n redundancies). */
export function topSynergy(dist: BoundDistribution, measure: Measure = "mmi"): number {
  return withScratchDir((dir) => {
    const distPath = writeScratch(dir, "dist.json", distributionJson(dist));
    const out = runCli(["synergy", "--dist", distPath, "--measure", measure, "--format", "json"]);
    return JSON.parse(out).top_synergy as number;
  });
}

/**
 * Two-sided decomposition of transition pairs over k channels: a mapping
 * from "source->target" antichain labels to raw atom values (no null
 * correction; pairs carry no temporal order to shuffle).
 */
export function phiid(
  transitions: TransitionPair[],
  k: number,
  measure: "mmi" = "mmi",
  alphabet?: number,
): Record<string, number> {
  if (transitions.length === 0) throw new DataError("empty transition list");
  if (k > 4) throw new CapacityError(`k=${k} channels unsupported (limit 4)`);
  const rows = transitions.map(([src, tgt]) => {
    if (src.length !== k || tgt.length !== k) {
      throw new DataError(`transition pair has wrong width for k=${k}`);
    }
    return [...src, ...tgt].join(",");
  });
  return withScratchDir((dir) => {
    const path = writeScratch(dir, "pairs.csv", rows.join("\n") + "\n");
    const args = ["phiid", "--transitions", path, "--measure", measure, "--format", "json"];
    if (alphabet !== undefined) args.push("--alphabet", String(alphabet));
    const payload = JSON.parse(runCli(args));
    const out: Record<string, number> = {};
    for (const a of payload.atoms) out[`${a.source}->${a.target}`] = a.raw;
    return out;
  });
}
