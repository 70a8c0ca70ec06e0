/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_coverreport_free: (a: number, b: number) => void;
export const __wbg_get_coverreport_bound: (a: number) => number;
export const __wbg_get_coverreport_boxes: (a: number) => [number, number];
export const __wbg_get_coverreport_centers: (a: number) => [number, number];
export const __wbg_get_coverreport_max_multiplicity: (a: number) => number;
export const __wbg_get_coverreport_multiplicity: (a: number) => [number, number];
export const __wbg_get_tracereport_direct: (a: number) => number;
export const __wbg_get_tracereport_direct_error: (a: number) => number;
export const __wbg_get_tracereport_homogeneous_dimension: (a: number) => number;
export const __wbg_get_tracereport_order: (a: number) => number;
export const __wbg_get_tracereport_residue: (a: number) => number;
export const __wbg_get_tracereport_weights: (a: number) => [number, number];
export const __wbg_get_weylreport_values: (a: number) => [number, number];
export const __wbg_set_coverreport_bound: (a: number, b: number) => void;
export const __wbg_set_coverreport_boxes: (a: number, b: number, c: number) => void;
export const __wbg_set_coverreport_centers: (a: number, b: number, c: number) => void;
export const __wbg_set_coverreport_max_multiplicity: (a: number, b: number) => void;
export const __wbg_set_coverreport_multiplicity: (a: number, b: number, c: number) => void;
export const __wbg_set_tracereport_direct: (a: number, b: number) => void;
export const __wbg_set_tracereport_direct_error: (a: number, b: number) => void;
export const __wbg_set_tracereport_homogeneous_dimension: (a: number, b: number) => void;
export const __wbg_set_tracereport_order: (a: number, b: number) => void;
export const __wbg_set_tracereport_residue: (a: number, b: number) => void;
export const __wbg_set_tracereport_weights: (a: number, b: number, c: number) => void;
export const __wbg_set_weylreport_values: (a: number, b: number, c: number) => void;
export const __wbg_tracereport_free: (a: number, b: number) => void;
export const __wbg_weylreport_free: (a: number, b: number) => void;
export const cover_plane: (a: number, b: number, c: number) => [number, number, number];
export const trace_diagonal: (a: number, b: number) => [number, number, number];
export const weyl_line: (a: number, b: number, c: number) => [number, number, number];
export const __wbg_set_tracereport_anisotropic: (a: number, b: number) => void;
export const __wbg_set_weylreport_exponent: (a: number, b: number) => void;
export const __wbg_set_weylreport_measured: (a: number, b: number) => void;
export const __wbg_set_weylreport_predicted: (a: number, b: number) => void;
export const __wbg_set_weylreport_stderr: (a: number, b: number) => void;
export const __wbg_set_weylreport_window_hi: (a: number, b: number) => void;
export const __wbg_set_weylreport_window_lo: (a: number, b: number) => void;
export const __wbg_get_tracereport_anisotropic: (a: number) => number;
export const __wbg_get_weylreport_exponent: (a: number) => number;
export const __wbg_get_weylreport_measured: (a: number) => number;
export const __wbg_get_weylreport_predicted: (a: number) => number;
export const __wbg_get_weylreport_stderr: (a: number) => number;
export const __wbg_get_weylreport_window_hi: (a: number) => number;
export const __wbg_get_weylreport_window_lo: (a: number) => number;
export const __wbindgen_export_0: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
