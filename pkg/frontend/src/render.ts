/**
 * DOM rendering and interaction wiring.
 *
 * Render-only contract: tooltip text, highlight spans, chart geometry, and
 * colors all come straight from the artifact (the palette below only maps
 * the artifact's colorIndex values to CSS colors). Nothing is recomputed.
 *
 * Interaction binding: hovering a mark lights up its entity span and shows
 * the tooltip; clicking an entity span lights up its mark. Both funnel
 * through the shared store, so only one selection is ever active.
 */

import type { Artifact, Fact } from "./schema.js";
import { ViewerStore } from "./state.js";

/** Categorical palette matching the pipeline's renderer, by colorIndex. */
export const PALETTE = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

export const ACTIVE_CLASS = "is-active";

function paletteColor(index: number): string {
  return PALETTE[((index % PALETTE.length) + PALETTE.length) % PALETTE.length];
}

export function markId(fact: number, row: number): string {
  return `mark-${fact}-${row}`;
}

/** Floating tooltip fed verbatim from a fact's tooltipLines. */
export class Tooltip {
  readonly element: HTMLElement;

  constructor(doc: Document) {
    this.element = doc.createElement("div");
    this.element.className = "gv-tooltip";
    this.element.style.position = "absolute";
    this.element.style.display = "none";
    doc.body.appendChild(this.element);
  }

  show(lines: string[], anchor: Element): void {
    this.element.textContent = "";
    for (const line of lines) {
      const row = this.element.ownerDocument.createElement("div");
      row.textContent = line;
      this.element.appendChild(row);
    }
    this.element.style.display = "block";
    this.place(anchor);
  }

  /** Above the mark by default; flips below when too close to the top. */
  private place(anchor: Element): void {
    const rect = anchor.getBoundingClientRect();
    const height = this.element.offsetHeight || 0;
    const win = this.element.ownerDocument.defaultView;
    const scrollX = win ? win.scrollX : 0;
    const scrollY = win ? win.scrollY : 0;
    let top = rect.top - height - 6;
    if (top < 0) {
      top = rect.bottom + 6;
      this.element.dataset.placement = "below";
    } else {
      this.element.dataset.placement = "above";
    }
    this.element.style.left = `${rect.left + scrollX}px`;
    this.element.style.top = `${top + scrollY}px`;
  }

  hide(): void {
    this.element.style.display = "none";
  }
}

function renderSegmentText(fact: Fact, factIndex: number, doc: Document): HTMLElement {
  const holder = doc.createElement("span");
  holder.className = "segment";
  holder.dataset.fact = String(factIndex);

  const spans = fact.visualization
    ? [...fact.visualization.highlightSpans].sort((a, b) => a.start - b.start)
    : [];
  const context = fact.context;
  let cursor = 0;
  for (const span of spans) {
    if (span.start < cursor || span.end > context.length) continue;
    holder.appendChild(doc.createTextNode(context.slice(cursor, span.start)));
    const entity = doc.createElement("span");
    entity.className = "entity";
    entity.dataset.fact = String(factIndex);
    entity.dataset.row = String(span.colorIndex);
    entity.style.background = `${paletteColor(span.colorIndex)}33`;
    entity.textContent = context.slice(span.start, span.end);
    holder.appendChild(entity);
    cursor = span.end;
  }
  holder.appendChild(doc.createTextNode(context.slice(cursor)));
  return holder;
}

function setActive(el: Element, active: boolean): void {
  const classes = (el.getAttribute("class") || "")
    .split(/\s+/)
    .filter((c) => c && c !== ACTIVE_CLASS);
  if (active) classes.push(ACTIVE_CLASS);
  el.setAttribute("class", classes.join(" "));
}

/**
 * Render the whole document into `root` and wire interactions to `store`.
 * Fact indices run across the document in order, matching the mark ids the
 * pipeline embeds in each SVG.
 */
export function renderDocument(artifact: Artifact, root: HTMLElement, store: ViewerStore): void {
  const doc = root.ownerDocument;
  root.textContent = "";
  const tooltip = new Tooltip(doc);

  if (artifact.title) {
    const h1 = doc.createElement("h1");
    h1.textContent = artifact.title;
    root.appendChild(h1);
  }

  const facts: Fact[] = [];
  let factIndex = 0;
  for (const paragraph of artifact.paragraphs) {
    const p = doc.createElement("p");
    paragraph.forEach((fact, position) => {
      const index = factIndex++;
      facts.push(fact);
      if (position > 0) {
        p.appendChild(doc.createTextNode(" "));
      }
      p.appendChild(renderSegmentText(fact, index, doc));
      if (fact.visualization?.svg) {
        const slot = doc.createElement("span");
        slot.className = "chart";
        slot.innerHTML = fact.visualization.svg;
        slot.querySelector("svg")?.setAttribute("class", "wsv");
        p.appendChild(doc.createTextNode(" "));
        p.appendChild(slot);
      }
    });
    root.appendChild(p);
  }

  // Mark elements are ordered like the artifact's marks array, but a row's
  // stable identity is its colorIndex (rank charts render marks re-sorted).
  // Selections therefore carry colorIndex, and both directions translate
  // through the marks array.
  const markPosition = (fact: number, color: number): number =>
    (facts[fact]?.visualization?.marks ?? []).findIndex((m) => m.colorIndex === color);

  // mark hover -> tooltip + entity highlight
  const markElements = root.querySelectorAll('[id^="mark-"]');
  for (const el of Array.from(markElements)) {
    const parts = (el.getAttribute("id") || "").split("-");
    const fact = Number(parts[1]);
    const position = Number(parts[2]);
    if (!Number.isInteger(fact) || !Number.isInteger(position)) continue;
    const color = facts[fact]?.visualization?.marks[position]?.colorIndex ?? position;
    el.addEventListener("mouseenter", () => {
      store.hoverMark(fact, color);
      const lines = facts[fact]?.visualization?.tooltipLines ?? [];
      tooltip.show([...lines], el);
    });
    el.addEventListener("mouseleave", () => {
      store.unhoverMark();
      tooltip.hide();
    });
  }

  // entity click -> mark highlight
  for (const el of Array.from(root.querySelectorAll("span.entity"))) {
    el.addEventListener("click", () => {
      const fact = Number((el as HTMLElement).dataset.fact);
      const row = Number((el as HTMLElement).dataset.row);
      store.selectEntity(fact, row);
    });
  }

  store.subscribe(() => {
    const resolved = store.resolved();
    for (const el of Array.from(root.querySelectorAll(`.${ACTIVE_CLASS}`))) {
      setActive(el, false);
    }
    if (!resolved) return;
    const position = markPosition(resolved.fact, resolved.row);
    const mark = position >= 0
      ? root.querySelector(`#${markId(resolved.fact, position)}`)
      : null;
    if (mark) setActive(mark, true);
    const entity = root.querySelector(
      `span.entity[data-fact="${resolved.fact}"][data-row="${resolved.row}"]`,
    );
    if (entity) setActive(entity, true);
  });
}
