// End-to-end: the real panel DOM driven against the real service,
// seeded from the committed 200-document fixture. The service is built
// and spawned here; the app talks to it over HTTP with a cookie jar.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { PanelApp } from "../src/app.js";
import type { FetchLike } from "../src/api.js";

const REPO_ROOT = resolve(__dirname, "..", "..");
const CORPUS = join(REPO_ROOT, "tests", "fixtures", "corpus_200.jsonl");
const PYTHON = process.env.PYTHON ?? "python3";

let proc: ChildProcess | null = null;
let baseUrl = "";

function freePort(): Promise<number> {
  return new Promise((resolvePort) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const port = (srv.address() as { port: number }).port;
      srv.close(() => resolvePort(port));
    });
  });
}

// node fetch does not keep cookies; the session cookie is carried by hand
function cookieFetch(): FetchLike {
  let cookie: string | null = null;
  return async (input, init) => {
    const headers = new Headers(init?.headers);
    if (cookie) {
      headers.set("Cookie", cookie);
    }
    const response = await fetch(input, { ...init, headers });
    const setCookie = response.headers.get("set-cookie");
    if (setCookie) {
      cookie = setCookie.split(";")[0];
    }
    return response;
  };
}

async function waitFor(probe: () => Promise<boolean>, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      if (await probe()) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error("timed out waiting for the service");
}

beforeAll(async () => {
  const workDir = mkdtempSync(join(tmpdir(), "evonav-e2e-"));
  const mapPath = join(workDir, "map.json");
  execFileSync(
    PYTHON,
    ["-m", "evonav.cli", "build", "--corpus", CORPUS, "--out", mapPath, "--seed", "7"],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  const configPath = join(workDir, "service.conf");
  writeFileSync(
    configPath,
    [
      `listen_address = 127.0.0.1:${port}`,
      `corpus_path = ${CORPUS}`,
      `map_path = ${mapPath}`,
      `store_path = ${join(workDir, "store.db")}`,
      "rng_seed = 12",
      "refresh_interval = 5",
      "",
    ].join("\n"),
  );
  proc = spawn(PYTHON, ["-m", "evonav.cli", "serve", "--config", configPath], {
    cwd: REPO_ROOT,
    stdio: "ignore",
  });
  await waitFor(async () => (await fetch(`${baseUrl}/healthz`)).ok);
});

afterAll(() => {
  proc?.kill("SIGKILL");
});

function mountApp(): PanelApp {
  document.body.innerHTML = '<nav id="p"></nav><main id="c"></main>';
  return new PanelApp({
    document,
    panelRoot: document.getElementById("p")!,
    contentRoot: document.getElementById("c")!,
    fetchImpl: cookieFetch(),
    baseUrl,
  });
}

function press(selector: string): void {
  const node = document.querySelector(selector) as HTMLElement | null;
  if (!node) throw new Error(`nothing matches ${selector}`);
  node.dispatchEvent(new MouseEvent("click", { bubbles: true, cancelable: true }));
}

async function waitForDom(predicate: () => boolean, timeoutMs = 10_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await new Promise((r) => setTimeout(r, 50));
  }
  throw new Error("DOM never reached the expected state");
}

describe("panel against the live seeded service", () => {
  it("covers the full UI contract", async () => {
    const app = mountApp();
    await app.pollOnce();

    // 1. the panel renders set_size rows, each with a fitness value
    const rows = document.querySelectorAll('[data-testid="set-row"]');
    expect(rows).toHaveLength(10);
    expect(document.querySelectorAll('[data-testid="fitness"]')).toHaveLength(10);

    // 2. clicking a link raises its fitness on the server and the panel echoes it
    const firstDoc = rows[0].getAttribute("data-doc")!;
    press('[data-testid="set-row"] a.title');
    await waitForDom(() => {
      const row = document.querySelector(`[data-testid="set-row"][data-doc="${firstDoc}"]`);
      return row?.querySelector('[data-testid="fitness"]')?.textContent === "10";
    });
    expect(document.querySelector('[data-testid="content-body"]')?.textContent).toBeTruthy();

    // 3. add-to-favorites moves the row out of the set and into favorites
    press(`[data-testid="set-row"][data-doc="${firstDoc}"] [data-testid="add-favorite"]`);
    await waitForDom(
      () => document.querySelectorAll('[data-testid="favorite-row"]').length === 1,
    );
    const panelDocs = [...document.querySelectorAll('[data-testid="set-row"]')].map((r) =>
      r.getAttribute("data-doc"),
    );
    expect(panelDocs).not.toContain(firstDoc);
    expect(panelDocs).toHaveLength(10);
    expect(
      document.querySelector('[data-testid="favorite-row"]')?.getAttribute("data-doc"),
    ).toBe(firstDoc);

    // 4. pause freezes the countdown (server-side truth, re-polled)
    press('[data-testid="pause"]');
    await waitForDom(() => app.state.paused);
    const frozen = app.state.secondsRemaining;
    await new Promise((r) => setTimeout(r, 1500));
    await app.pollOnce();
    expect(app.state.paused).toBe(true);
    expect(app.state.secondsRemaining).toBeCloseTo(frozen, 2);

    // 5. the Refresh (reset) control zeroes every fitness value
    press('[data-testid="pause"]'); // resume first
    await waitForDom(() => !app.state.paused);
    press('[data-testid="reset"]');
    await waitForDom(() =>
      [...document.querySelectorAll('[data-testid="fitness"]')].every(
        (n) => n.textContent === "0",
      ),
    );
    expect(document.querySelectorAll('[data-testid="set-row"]')).toHaveLength(10);
  }, 60_000);
});
