// Generated by scripts/gen_colors.py from the server's fill table.
// Do not edit by hand; regenerate instead.

export const FILL_COLORS = {
  "source-grey": "#4a4a4a",
  "selected-yellow": "#f5e6a3",
  "related-green": "#7bc47f",
  "default": "#cfd8dc",
} as const;

export type FillToken = keyof typeof FILL_COLORS;
