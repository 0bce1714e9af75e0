/** Interactive segmentation UI: load an image or corpus preset, scribble
 * foreground/background seeds, run the solver on the server, and inspect
 * the mask overlay and its statistics. */

import { ApiError, Client, type SegmentParams, type SegmentStats } from "./api.js";
import { ScribbleState, type SeedClass } from "./scribble.js";

const FG_COLOR = "rgba(235, 64, 52, 0.95)";
const BG_COLOR = "rgba(52, 110, 235, 0.95)";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

class App {
  private client = new Client();
  private scribbles = new ScribbleState(0, 0);
  private imageB64: string | null = null;
  private imageEl: HTMLImageElement | null = null;
  private maskEl: HTMLImageElement | null = null; // kept until next success
  private pending = false;
  private drawing: Array<[number, number]> | null = null;

  private imageCanvas = el<HTMLCanvasElement>("image-canvas");
  private overlayCanvas = el<HTMLCanvasElement>("overlay-canvas");
  private scribbleCanvas = el<HTMLCanvasElement>("scribble-canvas");
  private runButton = el<HTMLButtonElement>("run");
  private undoButton = el<HTMLButtonElement>("undo");
  private clearButton = el<HTMLButtonElement>("clear");
  private hint = el<HTMLSpanElement>("run-hint");
  private banner = el<HTMLDivElement>("banner");
  private statsPanel = el<HTMLDivElement>("stats");
  private presets = el<HTMLDivElement>("presets");

  constructor() {
    this.wireControls();
    this.loadPresets();
  }

  private wireControls(): void {
    for (const cls of ["fg", "bg"] as SeedClass[]) {
      el<HTMLInputElement>(`class-${cls}`).addEventListener("change", () => {
        this.scribbles.activeClass = cls;
      });
    }
    const brush = el<HTMLInputElement>("brush");
    brush.addEventListener("input", () => {
      this.scribbles.brushRadius = Number(brush.value);
      el<HTMLSpanElement>("brush-value").textContent = brush.value;
    });
    const opacity = el<HTMLInputElement>("opacity");
    opacity.addEventListener("input", () => this.renderOverlay());
    el<HTMLInputElement>("show-overlay").addEventListener("change", () =>
      this.renderOverlay(),
    );

    this.undoButton.addEventListener("click", () => {
      this.scribbles.undo();
      this.renderScribbles();
      this.refreshRunState();
    });
    this.clearButton.addEventListener("click", () => {
      this.scribbles.clear();
      this.renderScribbles();
      this.refreshRunState();
    });
    this.runButton.addEventListener("click", () => void this.run());

    const upload = el<HTMLInputElement>("upload");
    upload.addEventListener("change", () => {
      const file = upload.files?.[0];
      if (file) {
        void this.loadUpload(file);
      }
    });

    const canvas = this.scribbleCanvas;
    canvas.addEventListener("pointerdown", (ev) => {
      if (!this.imageEl) {
        return;
      }
      canvas.setPointerCapture(ev.pointerId);
      this.drawing = [this.canvasPoint(ev)];
      this.renderScribbles();
    });
    canvas.addEventListener("pointermove", (ev) => {
      if (this.drawing) {
        this.drawing.push(this.canvasPoint(ev));
        this.renderScribbles();
      }
    });
    const finish = () => {
      if (this.drawing) {
        this.scribbles.addStroke(this.drawing);
        this.drawing = null;
        this.renderScribbles();
        this.refreshRunState();
      }
    };
    canvas.addEventListener("pointerup", finish);
    canvas.addEventListener("pointercancel", finish);
  }

  private canvasPoint(ev: PointerEvent): [number, number] {
    const rect = this.scribbleCanvas.getBoundingClientRect();
    const x = ((ev.clientX - rect.left) / rect.width) * this.scribbles.width;
    const y = ((ev.clientY - rect.top) / rect.height) * this.scribbles.height;
    return [x, y];
  }

  private async loadPresets(): Promise<void> {
    try {
      const names = await this.client.corpusNames();
      for (const name of names) {
        const button = document.createElement("button");
        button.textContent = name;
        button.addEventListener("click", () => void this.loadCase(name));
        this.presets.appendChild(button);
      }
    } catch (err) {
      this.showBanner(`corpus unavailable: ${String(err)}`);
    }
  }

  private async loadCase(name: string): Promise<void> {
    try {
      const data = await this.client.corpusCase(name);
      await this.setImage(data.image, data.width, data.height);
      // replay the bundled seeds as two radius-0 strokes, still undoable
      this.scribbles.addStroke(data.seeds.fg, 0, "fg");
      this.scribbles.addStroke(data.seeds.bg, 0, "bg");
      this.renderScribbles();
      this.refreshRunState();
    } catch (err) {
      this.showBanner(String(err));
    }
  }

  private async loadUpload(file: File): Promise<void> {
    const buf = new Uint8Array(await file.arrayBuffer());
    let binary = "";
    for (const byte of buf) {
      binary += String.fromCharCode(byte);
    }
    const b64 = btoa(binary);
    const img = await decodeImage(b64);
    await this.setImage(b64, img.naturalWidth, img.naturalHeight);
  }

  private async setImage(b64: string, width: number, height: number): Promise<void> {
    this.imageB64 = b64;
    this.imageEl = await decodeImage(b64);
    this.maskEl = null;
    this.scribbles.resize(width, height);
    for (const canvas of [this.imageCanvas, this.overlayCanvas, this.scribbleCanvas]) {
      canvas.width = width;
      canvas.height = height;
    }
    const ctx = this.imageCanvas.getContext("2d")!;
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(this.imageEl, 0, 0);
    this.renderOverlay();
    this.renderScribbles();
    this.refreshRunState();
  }

  private renderScribbles(): void {
    const ctx = this.scribbleCanvas.getContext("2d")!;
    ctx.clearRect(0, 0, this.scribbleCanvas.width, this.scribbleCanvas.height);
    const paint = (cls: SeedClass, radius: number, points: Array<[number, number]>) => {
      ctx.fillStyle = cls === "fg" ? FG_COLOR : BG_COLOR;
      for (const [x, y] of points) {
        ctx.beginPath();
        ctx.arc(x, y, Math.max(radius, 0.5), 0, 2 * Math.PI);
        ctx.fill();
      }
    };
    for (const stroke of this.scribbles.list()) {
      paint(stroke.cls, stroke.radius, stroke.points);
    }
    if (this.drawing) {
      paint(this.scribbles.activeClass, this.scribbles.brushRadius, this.drawing);
    }
  }

  private renderOverlay(): void {
    const ctx = this.overlayCanvas.getContext("2d")!;
    ctx.clearRect(0, 0, this.overlayCanvas.width, this.overlayCanvas.height);
    if (!this.maskEl || !el<HTMLInputElement>("show-overlay").checked) {
      return;
    }
    const opacity = Number(el<HTMLInputElement>("opacity").value);
    ctx.globalAlpha = opacity;
    // tint the white mask pixels; black stays transparent via lighter blend
    ctx.drawImage(this.maskEl, 0, 0);
    ctx.globalCompositeOperation = "multiply";
    ctx.fillStyle = "rgb(80, 220, 100)";
    ctx.fillRect(0, 0, this.overlayCanvas.width, this.overlayCanvas.height);
    ctx.globalCompositeOperation = "destination-in";
    ctx.drawImage(this.maskEl, 0, 0);
    ctx.globalCompositeOperation = "source-over";
    ctx.globalAlpha = 1.0;
  }

  private refreshRunState(): void {
    const haveBoth =
      this.scribbles.count("fg") > 0 && this.scribbles.count("bg") > 0;
    this.runButton.disabled = this.pending || !haveBoth || !this.imageB64;
    this.hint.textContent = !this.imageB64
      ? "load an image or preset first"
      : haveBoth
        ? ""
        : "need at least one foreground and one background stroke";
  }

  private readParams(): SegmentParams {
    return {
      p: Number(el<HTMLInputElement>("param-p").value),
      beta: Number(el<HTMLInputElement>("param-beta").value),
      lambda: Number(el<HTMLInputElement>("param-lambda").value),
      mode: el<HTMLSelectElement>("param-mode").value as "magnitude" | "signed",
      probing: el<HTMLInputElement>("param-probing").checked,
    };
  }

  private async run(): Promise<void> {
    if (this.pending || !this.imageB64) {
      return;
    }
    this.pending = true;
    this.refreshRunState();
    this.showBanner(null);
    try {
      const resp = await this.client.segment(
        this.imageB64,
        this.scribbles.toPayload().strokes,
        this.readParams(),
      );
      this.maskEl = await decodeImage(resp.mask); // replace only on success
      this.renderOverlay();
      this.renderStats(resp.stats);
    } catch (err) {
      const detail = err instanceof ApiError ? `server: ${err.message}` : String(err);
      this.showBanner(detail); // scribbles and previous overlay preserved
    } finally {
      this.pending = false;
      this.refreshRunState();
    }
  }

  private renderStats(stats: SegmentStats): void {
    this.statsPanel.innerHTML = "";
    const rows: Array<[string, string]> = [
      ["energy", stats.energy.toPrecision(8)],
      ["lower bound", stats.lower_bound.toPrecision(8)],
      ["unlabeled", String(stats.unlabeled_count)],
      ["runtime", `${stats.runtime_ms.toFixed(1)} ms`],
    ];
    for (const [key, value] of rows) {
      const div = document.createElement("div");
      div.className = "stat";
      div.innerHTML = `<span>${key}</span><b>${value}</b>`;
      this.statsPanel.appendChild(div);
    }
  }

  private showBanner(message: string | null): void {
    this.banner.textContent = message ?? "";
    this.banner.style.display = message ? "block" : "none";
  }
}

function decodeImage(b64: string): Promise<HTMLImageElement> {
  return new Promise((resolve, reject) => {
    const img = new Image();
    img.onload = () => resolve(img);
    img.onerror = () => reject(new Error("mask decode failed"));
    img.src = `data:image/png;base64,${b64}`;
  });
}

new App();
