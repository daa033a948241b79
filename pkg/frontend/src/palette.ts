/** Fixed qualitative palette indexed by palette_index; unclassified is gray. */

const COLORS = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#9c755f",
  "#ff9da7",
  "#86bcb6",
];

export const UNCLASSIFIED_COLOR = "#9aa0a6";

export function topicColor(paletteIndex: number): string {
  return COLORS[((paletteIndex % COLORS.length) + COLORS.length) % COLORS.length];
}
