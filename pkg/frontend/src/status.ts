// Live charging display: polls /api/status and re-renders the column table.
// Any failure (network, bad payload) keeps the last good view on screen and
// retries with backoff; nothing here may ever throw into the page.

export interface ColumnStatus {
    session_id: string;
    status: string;
    completion_pct: number;
    delivered_kwh: number;
    cost: number;
    remaining_s: number;
}

export interface StatusView {
    version: number;
    clock: number;
    aggregate_demand_kw: number;
    columns: (ColumnStatus | null)[];
    fetched_at: number;
}

const KNOWN_STATUSES = new Set(
    ["Charging", "Paused", "Stopped", "Completed", "Departed"]);

/** Parse and validate a status payload; returns null if it is unusable.
 *  Unknown extra fields are ignored for forward compatibility. */
export function parseStatus(raw: unknown, now?: number): StatusView | null {
    if (typeof raw !== "object" || raw === null) return null;
    const obj = raw as Record<string, unknown>;
    if (obj.version !== 1) return null;
    if (!Array.isArray(obj.columns)) return null;
    const columns: (ColumnStatus | null)[] = [];
    for (const entry of obj.columns) {
        if (entry === null) {
            columns.push(null);
            continue;
        }
        if (typeof entry !== "object") return null;
        const col = entry as Record<string, unknown>;
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

export function renderColumns(view: StatusView, table: HTMLElement,
                              demandEl: HTMLElement | null): void {
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

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class StatusPoller {
    lastView: StatusView | null = null;
    private inFlight = false;
    private failures = 0;
    private timer: ReturnType<typeof setTimeout> | null = null;

    constructor(private fetchFn: FetchLike,
                private onView: (view: StatusView) => void,
                private onStale: (stale: boolean) => void,
                private intervalMs = 2000,
                private maxBackoffMs = 30000) {}

    start(): void {
        void this.pollOnce();
        this.schedule();
    }

    stop(): void {
        if (this.timer !== null) clearTimeout(this.timer);
        this.timer = null;
    }

    private schedule(): void {
        // exponential backoff while the server is unreachable
        const delay = this.failures === 0
            ? this.intervalMs
            : Math.min(this.intervalMs * Math.pow(2, this.failures),
                       this.maxBackoffMs);
        this.timer = setTimeout(() => {
            void this.pollOnce();
            this.schedule();
        }, delay);
    }

    async pollOnce(): Promise<void> {
        if (this.inFlight) return;
        this.inFlight = true;
        try {
            const resp = await this.fetchFn("/api/status");
            if (!resp.ok) throw new Error(`status ${resp.status}`);
            const view = parseStatus(await resp.json());
            if (view === null) throw new Error("malformed payload");
            this.lastView = view;
            this.failures = 0;
            this.onView(view);
            this.onStale(false);
        } catch {
            // keep the last view; just mark it stale
            this.failures += 1;
            this.onStale(true);
        } finally {
            this.inFlight = false;
        }
    }
}
