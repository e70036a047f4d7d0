/**
 * Application shell: open a local `.gist.json` file, validate it, and either
 * render the document or show an error banner naming the offending path.
 * Read-only and file-driven; no server and no pipeline calls.
 */

import { ArtifactError, parseArtifact } from "./schema.js";
import { renderDocument } from "./render.js";
import { ViewerStore } from "./state.js";

export function showBanner(root: HTMLElement, message: string): void {
  const banner = root.ownerDocument.createElement("div");
  banner.className = "error-banner";
  banner.setAttribute("role", "alert");
  banner.textContent = message;
  root.textContent = "";
  root.appendChild(banner);
}

/** Parse artifact text into the given root; returns the store on success. */
export function loadArtifactText(text: string, root: HTMLElement): ViewerStore | null {
  let artifact;
  try {
    artifact = parseArtifact(text);
  } catch (err) {
    if (err instanceof ArtifactError) {
      showBanner(root, `Could not load document. ${err.message}`);
      return null;
    }
    throw err;
  }
  const store = new ViewerStore();
  store.setArtifact(artifact);
  renderDocument(artifact, root, store);
  return store;
}

export function initApp(doc: Document): void {
  const input = doc.querySelector<HTMLInputElement>("#artifact-file");
  const root = doc.querySelector<HTMLElement>("#document-root");
  if (!input || !root) return;
  input.addEventListener("change", () => {
    const file = input.files?.[0];
    if (!file) return;
    file.text().then(
      (text) => loadArtifactText(text, root),
      (err) => showBanner(root, `Could not read file: ${err}`),
    );
  });
}

if (typeof document !== "undefined" && document.querySelector("#artifact-file")) {
  initApp(document);
}
