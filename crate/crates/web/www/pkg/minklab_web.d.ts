/* tslint:disable */
/* eslint-disable */

/**
 * `alpha_*(n, k, p)` and the resulting bound on `q`.
 */
export function alpha_star_bound(n: number, k: number, p: number): string;

/**
 * Closed-form membership of `(p, q)` in a uniqueness region; `k = 0`
 * means "not given".
 */
export function check_region(region: string, n: number, k: number, p: number, q: number): string;

/**
 * Boundary, curvature radii and roundness of a planar body.
 *
 * `kind` is `sphere` (radius `a`, center offset `b`), `ellipse` (semi-axes
 * `a`, `b`) or `random` (mean radius `a`, perturbation `amplitude`).
 */
export function planar_body(kind: string, a: number, b: number, amplitude: number, seed: number, resolution: number): string;

/**
 * Membership of a `cols x rows` lattice over `[p0, p1] x [q0, q1]`,
 * row-major from `q1` down, as a string of `0`/`1`.
 */
export function region_map(region: string, n: number, k: number, p0: number, p1: number, q0: number, q1: number, cols: number, rows: number): string;

/**
 * Newton solve of `u^{1-p} r^{q-2} (u'' + u) = 1` from a seeded random
 * perturbation of the unit circle.
 */
export function solve_planar(p: number, q: number, amplitude: number, seed: number, resolution: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly alpha_star_bound: (a: number, b: number, c: number) => [number, number];
    readonly check_region: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly planar_body: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly region_map: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number];
    readonly solve_planar: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
