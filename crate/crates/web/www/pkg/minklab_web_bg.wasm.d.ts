/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const alpha_star_bound: (a: number, b: number, c: number) => [number, number];
export const check_region: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
export const planar_body: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
export const region_map: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number];
export const solve_planar: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
