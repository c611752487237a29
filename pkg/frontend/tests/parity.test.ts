/**
 * Parity suite: the bindings must reproduce the CLI's outputs exactly on
 * the benchmark suite, and surface its error contract as typed errors.
 */

import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";

import {
  CapacityError,
  DataError,
  canonicalDistribution,
  phiid,
  pid,
  pidDetailed,
  topSynergy,
} from "../src/index.js";
import { runCli, withScratchDir, writeScratch } from "../src/runner.js";

const CANONICAL = ["uniform", "xor", "unq", "red"] as const;

beforeAll(() => {
  // Shared matrix cache so binding calls and direct CLI calls use the same file.
  process.env.FASTMOBIUS_MATRIX_DIR = mkdtempSync(join(tmpdir(), "fm-cache-"));
});

function cliPid(name: string, measure: string): Array<{ antichain: string; atom: number }> {
  const out = runCli([
    "pid", "--dist", `canonical:${name}`, "--measure", measure, "--format", "json",
  ]);
  return JSON.parse(out).atoms;
}

describe("pid parity on the canonical suite (n=5)", () => {
  for (const name of CANONICAL) {
    for (const measure of ["mmi", "min"] as const) {
      it(`${name} / ${measure} matches the CLI to 1e-12`, () => {
        const viaBindings = pid(canonicalDistribution(name), measure);
        const direct = cliPid(name, measure);
        expect(viaBindings.length).toBe(7579);
        expect(direct.length).toBe(7579);
        for (let i = 0; i < direct.length; i++) {
          // antichain labels round-trip byte-identically
          expect(viaBindings[i][0]).toBe(direct[i].antichain);
          expect(Math.abs(viaBindings[i][1] - direct[i].atom)).toBeLessThanOrEqual(1e-12);
        }
      });
    }
  }

  it("xor puts its bit in the full-synergy atom", () => {
    const atoms = new Map(pid(canonicalDistribution("xor")));
    expect(atoms.get("(12345)")).toBeCloseTo(1.0, 12);
    let nonzero = 0;
    for (const [, v] of atoms) if (Math.abs(v) > 1e-12) nonzero++;
    expect(nonzero).toBe(1);
  });

  it("redundancies from pidDetailed match mutual informations on singletons", () => {
    const rows = pidDetailed(canonicalDistribution("unq"), "mmi");
    const byLabel = new Map(rows.map((r) => [r.antichain, r]));
    expect(byLabel.get("(1)")!.redundancy).toBeCloseTo(1.0, 12);
    expect(byLabel.get("(2)")!.redundancy).toBeCloseTo(0.0, 12);
  });
});

describe("top synergy shortcut", () => {
  it("agrees with the full decomposition on the suite", () => {
    expect(topSynergy(canonicalDistribution("xor"))).toBeCloseTo(1.0, 12);
    expect(topSynergy(canonicalDistribution("red"))).toBeCloseTo(0.0, 12);
    expect(topSynergy(canonicalDistribution("unq"), "min")).toBeCloseTo(0.0, 12);
    const atoms = new Map(pid(canonicalDistribution("uniform")));
    expect(topSynergy(canonicalDistribution("uniform"))).toBeCloseTo(
      atoms.get("(12345)")!,
      12,
    );
  });
});

function cyclePairs(length: number, alphabet: number): Array<[number[], number[]]> {
  const pairs: Array<[number[], number[]]> = [];
  for (let t = 0; t < length; t++) {
    const a = t % alphabet;
    const b = (t + 1) % alphabet;
    pairs.push([[a, a], [b, b]]);
  }
  return pairs;
}

describe("phiid over transition pairs", () => {
  it("copy process puts 1 bit in the bottom (storage) atom", () => {
    const atoms = phiid(cyclePairs(64, 2), 2);
    expect(atoms["(1)(2)->(1)(2)"]).toBeCloseTo(1.0, 12);
    const others = Object.entries(atoms).filter(([k]) => k !== "(1)(2)->(1)(2)");
    for (const [, v] of others) expect(Math.abs(v)).toBeLessThanOrEqual(1e-12);
  });

  it("matches a direct CLI run on the same pairs and sums to the total information", () => {
    const pairs = cyclePairs(60, 3);
    const atoms = phiid(pairs, 2);
    const direct = withScratchDir((dir) => {
      const csv = pairs.map(([s, t]) => [...s, ...t].join(",")).join("\n") + "\n";
      const path = writeScratch(dir, "pairs.csv", csv);
      return JSON.parse(runCli(["phiid", "--transitions", path, "--format", "json"]));
    });
    let sum = 0;
    for (const a of direct.atoms) {
      expect(Math.abs(atoms[`${a.source}->${a.target}`] - a.raw)).toBeLessThanOrEqual(1e-12);
      sum += a.raw;
    }
    expect(Math.abs(sum - direct.total_mutual_information)).toBeLessThanOrEqual(1e-9);
  });

  it("surfaces the error contract as typed errors", () => {
    expect(() => phiid([], 2)).toThrow(DataError);
    expect(() => phiid([[[0], [1]]], 5)).toThrow(CapacityError);
    expect(() => phiid([[[0], [1]]], 2)).toThrow(DataError); // wrong width
  });
});

describe("input validation", () => {
  it("rejects pmf/arity mismatches before touching the engine", () => {
    expect(() =>
      pid({ sourceArities: [2, 2], targetArities: [2], pmf: [1, 0, 0] }),
    ).toThrow(DataError);
  });

  it("maps engine data errors", () => {
    expect(() =>
      pid({ sourceArities: [2, 2], targetArities: [2], pmf: Array(8).fill(0.2) }),
    ).toThrow(DataError); // pmf sums to 1.6
  });
});
