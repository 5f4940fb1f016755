/** Single-page controller for the blind evaluation study.
 *
 * The rater types a query, reads the blind-ranked results and clicks
 * through to posts; every click is logged to the service before the post
 * opens. The method behind each result list is never present in the data
 * this module receives, renders or stores.
 */

import { ApiClient, MetricsResponse, ResultItem } from "./api.js";

export class App {
  private client: ApiClient;
  private root: HTMLElement;
  private user: string;
  private queryId = "";
  private results: ResultItem[] = [];
  // click dedup guard per (query_id, position); the server dedups too
  private clickedPositions = new Set<string>();

  private input!: HTMLInputElement;
  private button!: HTMLButtonElement;
  private banner!: HTMLElement;
  private resultsEl!: HTMLElement;
  private metricsEl!: HTMLElement;

  constructor(client: ApiClient, root: HTMLElement, user = "anonymous") {
    this.client = client;
    this.root = root;
    this.user = user;
    this.renderShell();
  }

  private renderShell(): void {
    this.root.innerHTML = `
      <header>
        <h1>Weblog search study</h1>
        <form id="search-form">
          <input id="query" type="text" autocomplete="off"
                 placeholder="Search weblog posts" />
          <button id="submit" type="submit" disabled>Search</button>
        </form>
        <div id="banner" class="banner hidden"></div>
      </header>
      <main>
        <ol id="results"></ol>
        <section id="metrics" class="hidden"></section>
      </main>
      <footer>
        <a href="#" id="show-metrics">Study metrics</a>
      </footer>`;
    this.input = this.root.querySelector("#query") as HTMLInputElement;
    this.button = this.root.querySelector("#submit") as HTMLButtonElement;
    this.banner = this.root.querySelector("#banner") as HTMLElement;
    this.resultsEl = this.root.querySelector("#results") as HTMLElement;
    this.metricsEl = this.root.querySelector("#metrics") as HTMLElement;

    this.input.addEventListener("input", () => {
      this.button.disabled = this.input.value.trim() === "";
    });
    const form = this.root.querySelector("#search-form") as HTMLFormElement;
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.submitQuery(this.input.value);
    });
    const metricsLink = this.root.querySelector("#show-metrics") as HTMLElement;
    metricsLink.addEventListener("click", (ev) => {
      ev.preventDefault();
      void this.showMetrics();
    });
  }

  async submitQuery(text: string): Promise<void> {
    const query = text.trim();
    if (!query) return;
    this.hideBanner();
    let resp;
    try {
      resp = await this.client.search(query, this.user);
    } catch (err) {
      this.showBanner(`Search failed: ${(err as Error).message}`, "error");
      return; // no partial render
    }
    this.queryId = resp.query_id;
    this.results = resp.results;
    this.renderResults();
  }

  private renderResults(): void {
    this.metricsEl.classList.add("hidden");
    this.resultsEl.innerHTML = "";
    if (this.results.length === 0) {
      this.resultsEl.innerHTML = `<li class="empty">No results.</li>`;
      return;
    }
    for (const item of this.results) {
      const li = document.createElement("li");
      li.dataset.position = String(item.position);
      const link = document.createElement("a");
      link.href = item.permalink;
      link.target = "_blank"; // keep the result list open for more clicks
      link.rel = "noopener";
      link.textContent = item.permalink;
      const snippet = document.createElement("p");
      snippet.className = "snippet";
      snippet.textContent = item.snippet;
      const meta = document.createElement("span");
      meta.className = "meta";
      meta.textContent = item.weblog;
      li.append(link, snippet, meta);
      link.addEventListener("click", () => {
        // log first, navigation proceeds via the anchor itself
        void this.recordClick(item.position, item.permalink, li);
      });
      this.resultsEl.appendChild(li);
    }
  }

  /** Log a click; retries once, warns without blocking navigation. */
  async recordClick(
    position: number,
    permalink: string,
    row?: HTMLElement,
  ): Promise<void> {
    const key = `${this.queryId}:${position}`;
    if (this.clickedPositions.has(key)) return;
    this.clickedPositions.add(key);
    if (row) row.classList.add("visited");
    try {
      await this.client.click(this.queryId, position, permalink);
    } catch {
      try {
        await this.client.click(this.queryId, position, permalink);
      } catch {
        this.showBanner(
          "Could not record the click; the study log may be incomplete.",
          "warning",
        );
      }
    }
  }

  async showMetrics(): Promise<void> {
    let metrics: MetricsResponse;
    try {
      metrics = await this.client.metrics();
    } catch (err) {
      this.showBanner(`Metrics failed: ${(err as Error).message}`, "error");
      return;
    }
    this.resultsEl.innerHTML = "";
    this.metricsEl.classList.remove("hidden");
    const methods = Object.keys(metrics.methods).sort();
    if (methods.length === 0) {
      this.metricsEl.innerHTML = `<p class="empty">No rated queries yet.</p>`;
      return;
    }
    const rows = methods
      .map((m) => {
        const s = metrics.methods[m];
        return `<tr><td>${m}</td><td>${s.count}</td>` +
          `<td>${s.mean_si.toFixed(4)}</td><td>${s.std_si.toFixed(4)}</td></tr>`;
      })
      .join("");
    const pairs = metrics.pairwise
      .map((p) =>
        p.error
          ? `<tr><td>${p.a} vs ${p.b}</td><td colspan="2">${p.error}</td></tr>`
          : `<tr><td>${p.a} vs ${p.b}</td><td>${p.t!.toFixed(4)}</td>` +
            `<td>${p.p!.toExponential(3)}</td></tr>`,
      )
      .join("");
    this.metricsEl.innerHTML = `
      <h2>Success Index by ranking method</h2>
      <table>
        <thead><tr><th>method</th><th>queries</th><th>mean SI</th><th>std</th></tr></thead>
        <tbody>${rows}</tbody>
      </table>
      <h2>Pairwise Welch t-tests</h2>
      <table>
        <thead><tr><th>pair</th><th>t</th><th>p (two-tailed)</th></tr></thead>
        <tbody>${pairs}</tbody>
      </table>
      <p>${metrics.excluded} queries without clicks excluded.</p>`;
  }

  private showBanner(message: string, kind: "error" | "warning"): void {
    this.banner.textContent = message;
    this.banner.className = `banner ${kind}`;
  }

  private hideBanner(): void {
    this.banner.className = "banner hidden";
  }

  get currentQueryId(): string {
    return this.queryId;
  }

  get resultCount(): number {
    return this.results.length;
  }
}
