// Page entry point. Everything is wrapped so that no server response or
// runtime hiccup can surface an uncaught exception in the page.

import { wireActionButtons } from "./actions.js";
import { attachDwellTracking } from "./dwell.js";
import { renderColumns, StatusPoller, StatusView } from "./status.js";

const POLL_INTERVAL_MS = 2000;
const HEARTBEAT_MS = 30000;

function sendTimingBeacon(page: string, ms: number): void {
    const payload = JSON.stringify({ page, ms });
    try {
        if (navigator.sendBeacon &&
            navigator.sendBeacon("/api/timing",
                                 new Blob([payload],
                                          { type: "application/json" }))) {
            return;
        }
        void fetch("/api/timing", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: payload,
            keepalive: true,
        }).catch(() => undefined);
    } catch {
        // dropped silently
    }
}

function selectChargingSession(lastView: () => StatusView | null): string | null {
    const view = lastView();
    if (view === null) {
        const row = document.querySelector("tr[data-session]");
        return row ? (row as HTMLElement).dataset.session ?? null : null;
    }
    for (const col of view.columns) {
        if (col !== null && (col.status === "Charging" ||
                             col.status === "Paused")) {
            return col.session_id;
        }
    }
    return null;
}

function init(): void {
    const page = document.body.dataset.page ?? location.pathname;
    attachDwellTracking(page, sendTimingBeacon, HEARTBEAT_MS);

    const table = document.getElementById("columns");
    const demandEl = document.getElementById("demand");
    let poller: StatusPoller | null = null;
    if (table) {
        poller = new StatusPoller(
            (url, init) => fetch(url, init),
            (view) => renderColumns(view, table, demandEl),
            (stale) => table.classList.toggle("stale", stale),
            POLL_INTERVAL_MS);
        poller.start();
    }

    const buttons = Array.from(
        document.querySelectorAll<HTMLButtonElement>(".actions button"));
    if (buttons.length > 0) {
        wireActionButtons((url, init) => fetch(url, init), {
            buttons,
            messageEl: document.getElementById("action-msg"),
            selectSession: () => selectChargingSession(
                () => poller ? poller.lastView : null),
            onDone: () => { if (poller) void poller.pollOnce(); },
        });
    }
}

try {
    if (document.readyState === "loading") {
        document.addEventListener("DOMContentLoaded", () => {
            try { init(); } catch { /* never unmask the plumbing */ }
        });
    } else {
        init();
    }
} catch {
    // never let an error escape to the console of a visitor
}
