/** Display color for the category at `index` in the palette.
 *
 * Golden-angle hue rotation: deterministic, and neighbouring indices get
 * clearly different hues. Index -1 (unknown category) renders gray.
 */
export function categoryColor(index: number): string {
  if (index < 0) {
    return "hsl(0, 0%, 55%)";
  }
  const hue = Math.round((index * 137.508) % 360);
  return `hsl(${hue}, 70%, 45%)`;
}
