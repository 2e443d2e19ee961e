/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_fixedpoint_free: (a: number, b: number) => void;
export const closedFormResidual: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const fixedpoint_converged: (a: number) => number;
export const fixedpoint_exact: (a: number) => [number, number];
export const fixedpoint_iterations: (a: number) => number;
export const fixedpoint_maxRelError: (a: number) => number;
export const fixedpoint_t: (a: number) => [number, number];
export const fixedpoint_x: (a: number) => [number, number];
export const mlEval: (a: number, b: number) => [number, number, number];
export const solveLinear: (a: number, b: number, c: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
