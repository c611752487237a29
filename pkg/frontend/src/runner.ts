/**
 * Process plumbing: locate and drive the fastmobius CLI, mapping its stable
 * exit-code contract (2 usage, 3 capacity, 4 data/IO) onto typed errors.
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export class UsageError extends Error {}
export class CapacityError extends Error {}
export class DataError extends Error {}

/** Command used to reach the CLI; override with FASTMOBIUS_CLI. */
export function cliCommand(): string[] {
  const override = process.env.FASTMOBIUS_CLI;
  if (override) return override.split(/\s+/);
  return ["python3", "-m", "fastmobius.cli"];
}

export function runCli(args: string[]): string {
  const [cmd, ...prefix] = cliCommand();
  try {
    return execFileSync(cmd, [...prefix, ...args], {
      encoding: "utf8",
      maxBuffer: 256 * 1024 * 1024,
    });
  } catch (err) {
    const e = err as { status?: number; stderr?: Buffer | string };
    const stderr = (e.stderr ?? "").toString().trim();
    switch (e.status) {
      case 2:
        throw new UsageError(stderr);
      case 3:
        throw new CapacityError(stderr);
      case 4:
        throw new DataError(stderr);
      default:
        throw err;
    }
  }
}

/** Run `fn` with a scratch directory that is removed afterwards. */
export function withScratchDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "fastmobius-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

export function writeScratch(dir: string, name: string, contents: string): string {
  const path = join(dir, name);
  writeFileSync(path, contents);
  return path;
}

const matrixCache = new Map<number, string>();

/**
 * Path to a serialized Mobius matrix for n sources, generating it on first
 * use. Cached per process keyed by n; the cache directory is
 * FASTMOBIUS_MATRIX_DIR when set, otherwise a temp directory.
 */
export function ensureMatrixFile(n: number): string {
  const hit = matrixCache.get(n);
  if (hit) return hit;
  const dir = process.env.FASTMOBIUS_MATRIX_DIR ?? mkdtempSync(join(tmpdir(), "fastmobius-matrix-"));
  const path = join(dir, `mobius_n${n}.fmob`);
  runCli(["mobius", "--n", String(n), "--out", path]);
  matrixCache.set(n, path);
  return path;
}
