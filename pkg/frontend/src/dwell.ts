// Time-on-page tracking: accumulates foreground time only (the timer pauses
// while the page is hidden) and reports it to /api/timing as incremental
// beacons: one every heartbeat interval, one on page hide/unload.  The sum
// of reported durations never exceeds the wall-clock page lifetime.

export type BeaconSender = (page: string, ms: number) => void;

export class DwellTracker {
    private visibleSince: number | null = null;
    private accumulatedMs = 0;
    private reportedMs = 0;
    private timer: ReturnType<typeof setInterval> | null = null;

    constructor(private page: string,
                private send: BeaconSender,
                private heartbeatMs = 30000,
                private now: () => number = () => Date.now()) {}

    start(initiallyVisible = true): void {
        if (initiallyVisible) this.visibleSince = this.now();
        this.timer = setInterval(() => this.beat(), this.heartbeatMs);
    }

    /** Call on visibilitychange. */
    setVisible(visible: boolean): void {
        const t = this.now();
        if (visible && this.visibleSince === null) {
            this.visibleSince = t;
        } else if (!visible && this.visibleSince !== null) {
            this.accumulatedMs += t - this.visibleSince;
            this.visibleSince = null;
        }
    }

    /** Foreground time accumulated so far. */
    elapsedMs(): number {
        const open = this.visibleSince === null
            ? 0 : this.now() - this.visibleSince;
        return this.accumulatedMs + open;
    }

    private beat(): void {
        this.flush();
    }

    /** Send the not-yet-reported share of the dwell time. */
    flush(): void {
        const pending = this.elapsedMs() - this.reportedMs;
        if (pending <= 0) return;
        this.reportedMs += pending;
        try {
            this.send(this.page, Math.round(pending));
        } catch {
            // beacon failures are dropped silently
        }
    }

    /** Call on pagehide/unload: final beacon, stop the heartbeat. */
    finish(): void {
        this.setVisible(false);
        this.flush();
        if (this.timer !== null) clearInterval(this.timer);
        this.timer = null;
    }
}

export function attachDwellTracking(page: string, send: BeaconSender,
                                    heartbeatMs = 30000): DwellTracker {
    const tracker = new DwellTracker(page, send, heartbeatMs);
    tracker.start(document.visibilityState !== "hidden");
    document.addEventListener("visibilitychange", () => {
        tracker.setVisible(document.visibilityState === "visible");
    });
    window.addEventListener("pagehide", () => tracker.finish());
    return tracker;
}
