// Live charging display: polls /api/status and re-renders the column table.
// Any failure (network, bad payload) keeps the last good view on screen and
// retries with backoff; nothing here may ever throw into the page.
const KNOWN_STATUSES = new Set(["Charging", "Paused", "Stopped", "Completed", "Departed"]);
/** Parse and validate a status payload; returns null if it is unusable.
 *  Unknown extra fields are ignored for forward compatibility. */
export function parseStatus(raw, now) {
    if (typeof raw !== "object" || raw === null)
        return null;
    const obj = raw;
    if (obj.version !== 1)
        return null;
    if (!Array.isArray(obj.columns))
        return null;
    const columns = [];
    for (const entry of obj.columns) {
        if (entry === null) {
            columns.push(null);
            continue;
        }
        if (typeof entry !== "object")
            return null;
        const col = entry;
        if (typeof col.session_id !== "string" ||
            typeof col.status !== "string" ||
            !KNOWN_STATUSES.has(col.status) ||
            typeof col.completion_pct !== "number" ||
            !isFinite(col.completion_pct) ||
            typeof col.delivered_kwh !== "number" ||
            typeof col.cost !== "number" ||
            typeof col.remaining_s !== "number") {
            return null;
        }
        columns.push({
            session_id: col.session_id,
            status: col.status,
            completion_pct: Math.min(100, Math.max(0, col.completion_pct)),
            delivered_kwh: col.delivered_kwh,
            cost: col.cost,
            remaining_s: col.remaining_s,
        });
    }
    const demand = typeof obj.aggregate_demand_kw === "number"
        ? obj.aggregate_demand_kw : 0;
    const clock = typeof obj.clock === "number" ? obj.clock : 0;
    return {
        version: 1,
        clock,
        aggregate_demand_kw: demand,
        columns,
        fetched_at: now ?? Date.now(),
    };
}
export function renderColumns(view, table, demandEl) {
    const rows = view.columns.map((col, i) => {
        if (col === null) {
            return `<tr><td>${i + 1}</td><td colspan=5>vacant</td></tr>`;
        }
        const mins = Math.floor(col.remaining_s / 60);
        return `<tr data-session="${col.session_id}">` +
            `<td>${i + 1}</td><td>${col.status}</td>` +
            `<td>${col.completion_pct.toFixed(1)}%</td>` +
            `<td>${col.delivered_kwh.toFixed(2)} kWh</td>` +
            `<td>${col.cost.toFixed(2)}</td>` +
            `<td>${mins} min</td></tr>`;
    });
    const header = table.querySelector("tr");
    table.innerHTML = (header ? header.outerHTML : "") + rows.join("");
    if (demandEl) {
        demandEl.textContent = view.aggregate_demand_kw.toFixed(2);
    }
}
export class StatusPoller {
    constructor(fetchFn, onView, onStale, intervalMs = 2000, maxBackoffMs = 30000) {
        this.fetchFn = fetchFn;
        this.onView = onView;
        this.onStale = onStale;
        this.intervalMs = intervalMs;
        this.maxBackoffMs = maxBackoffMs;
        this.lastView = null;
        this.inFlight = false;
        this.failures = 0;
        this.timer = null;
    }
    start() {
        void this.pollOnce();
        this.schedule();
    }
    stop() {
        if (this.timer !== null)
            clearTimeout(this.timer);
        this.timer = null;
    }
    schedule() {
        // exponential backoff while the server is unreachable
        const delay = this.failures === 0
            ? this.intervalMs
            : Math.min(this.intervalMs * Math.pow(2, this.failures), this.maxBackoffMs);
        this.timer = setTimeout(() => {
            void this.pollOnce();
            this.schedule();
        }, delay);
    }
    async pollOnce() {
        if (this.inFlight)
            return;
        this.inFlight = true;
        try {
            const resp = await this.fetchFn("/api/status");
            if (!resp.ok)
                throw new Error(`status ${resp.status}`);
            const view = parseStatus(await resp.json());
            if (view === null)
                throw new Error("malformed payload");
            this.lastView = view;
            this.failures = 0;
            this.onView(view);
            this.onStale(false);
        }
        catch {
            // keep the last view; just mark it stale
            this.failures += 1;
            this.onStale(true);
        }
        finally {
            this.inFlight = false;
        }
    }
}
