/** Scribble state: strokes, undo, and the shared rasterization rule.
 *
 * Kept free of DOM types so the logic is unit-testable. The server
 * rasterizes scribbles with the same rule used for the preview here:
 * a pixel is painted when its center lies within the brush radius of
 * any stroke point (radius 0 marks the single containing pixel).
 */

export type SeedClass = "fg" | "bg";

export interface Stroke {
  cls: SeedClass;
  radius: number;
  points: Array<[number, number]>;
}

/** Wire format of one stroke in the segmentation request. */
export interface StrokePayload {
  class: SeedClass;
  radius: number;
  points: Array<[number, number]>;
}

export class ScribbleState {
  private strokes: ReadonlyArray<Stroke> = [];
  private undoStack: Array<ReadonlyArray<Stroke>> = [];
  activeClass: SeedClass = "fg";
  brushRadius = 2.0;

  constructor(
    public width: number,
    public height: number,
  ) {}

  /** Reset for a new image; clears strokes and history. */
  resize(width: number, height: number): void {
    this.width = width;
    this.height = height;
    this.strokes = [];
    this.undoStack = [];
  }

  list(): ReadonlyArray<Stroke> {
    return this.strokes;
  }

  count(cls: SeedClass): number {
    return this.strokes.filter((s) => s.cls === cls).length;
  }

  /** Begin a stroke under the active class; returns false if every point
   * fell outside the canvas (nothing is recorded then). */
  addStroke(points: Array<[number, number]>, radius?: number, cls?: SeedClass): boolean {
    const inside = points.filter(
      ([x, y]) => x >= 0 && y >= 0 && x < this.width && y < this.height,
    );
    if (inside.length === 0) {
      return false;
    }
    this.undoStack.push(this.strokes);
    this.strokes = [
      ...this.strokes,
      { cls: cls ?? this.activeClass, radius: radius ?? this.brushRadius, points: inside },
    ];
    return true;
  }

  /** Restore the exact stroke list from before the last addStroke. */
  undo(): boolean {
    const previous = this.undoStack.pop();
    if (previous === undefined) {
      return false;
    }
    this.strokes = previous;
    return true;
  }

  clear(): void {
    if (this.strokes.length > 0) {
      this.undoStack.push(this.strokes);
      this.strokes = [];
    }
  }

  /** Serialize for POST /api/segment; lossless for in-canvas points. */
  toPayload(): { strokes: StrokePayload[] } {
    return {
      strokes: this.strokes.map((s) => ({
        class: s.cls,
        radius: s.radius,
        points: s.points.map(([x, y]) => [x, y] as [number, number]),
      })),
    };
  }
}

/** Paint a stroke into a boolean pixel grid (row-major width*height).
 * Pixel-center-in-disk rule, identical to the server's rasterizer. */
export function rasterizeStroke(
  stroke: Stroke,
  width: number,
  height: number,
  out?: Uint8Array,
): Uint8Array {
  const grid = out ?? new Uint8Array(width * height);
  const r = Math.max(stroke.radius, 0);
  const rr = r * r;
  for (const [x, y] of stroke.points) {
    const rowLo = Math.max(0, Math.ceil(y - r));
    const rowHi = Math.min(height - 1, Math.floor(y + r));
    const colLo = Math.max(0, Math.ceil(x - r));
    const colHi = Math.min(width - 1, Math.floor(x + r));
    for (let row = rowLo; row <= rowHi; row++) {
      for (let col = colLo; col <= colHi; col++) {
        if ((col - x) * (col - x) + (row - y) * (row - y) <= rr) {
          grid[row * width + col] = 1;
        }
      }
    }
  }
  return grid;
}

/** Painted pixels of all strokes of one class. */
export function rasterizeClass(
  strokes: ReadonlyArray<Stroke>,
  cls: SeedClass,
  width: number,
  height: number,
): Uint8Array {
  const grid = new Uint8Array(width * height);
  for (const stroke of strokes) {
    if (stroke.cls === cls) {
      rasterizeStroke(stroke, width, height, grid);
    }
  }
  return grid;
}
