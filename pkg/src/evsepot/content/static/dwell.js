// Time-on-page tracking: accumulates foreground time only (the timer pauses
// while the page is hidden) and reports it to /api/timing as incremental
// beacons: one every heartbeat interval, one on page hide/unload.  The sum
// of reported durations never exceeds the wall-clock page lifetime.
export class DwellTracker {
    constructor(page, send, heartbeatMs = 30000, now = () => Date.now()) {
        this.page = page;
        this.send = send;
        this.heartbeatMs = heartbeatMs;
        this.now = now;
        this.visibleSince = null;
        this.accumulatedMs = 0;
        this.reportedMs = 0;
        this.timer = null;
    }
    start(initiallyVisible = true) {
        if (initiallyVisible)
            this.visibleSince = this.now();
        this.timer = setInterval(() => this.beat(), this.heartbeatMs);
    }
    /** Call on visibilitychange. */
    setVisible(visible) {
        const t = this.now();
        if (visible && this.visibleSince === null) {
            this.visibleSince = t;
        }
        else if (!visible && this.visibleSince !== null) {
            this.accumulatedMs += t - this.visibleSince;
            this.visibleSince = null;
        }
    }
    /** Foreground time accumulated so far. */
    elapsedMs() {
        const open = this.visibleSince === null
            ? 0 : this.now() - this.visibleSince;
        return this.accumulatedMs + open;
    }
    beat() {
        this.flush();
    }
    /** Send the not-yet-reported share of the dwell time. */
    flush() {
        const pending = this.elapsedMs() - this.reportedMs;
        if (pending <= 0)
            return;
        this.reportedMs += pending;
        try {
            this.send(this.page, Math.round(pending));
        }
        catch {
            // beacon failures are dropped silently
        }
    }
    /** Call on pagehide/unload: final beacon, stop the heartbeat. */
    finish() {
        this.setVisible(false);
        this.flush();
        if (this.timer !== null)
            clearInterval(this.timer);
        this.timer = null;
    }
}
export function attachDwellTracking(page, send, heartbeatMs = 30000) {
    const tracker = new DwellTracker(page, send, heartbeatMs);
    tracker.start(document.visibilityState !== "hidden");
    document.addEventListener("visibilitychange", () => {
        tracker.setVisible(document.visibilityState === "visible");
    });
    window.addEventListener("pagehide", () => tracker.finish());
    return tracker;
}
