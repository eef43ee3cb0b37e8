import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { DwellTracker } from "../src/dwell.js";

interface Beacon {
    page: string;
    ms: number;
}

describe("DwellTracker", () => {
    beforeEach(() => {
        vi.useFakeTimers();
    });
    afterEach(() => {
        vi.useRealTimers();
    });

    function tracker(beacons: Beacon[], heartbeatMs = 30000): DwellTracker {
        return new DwellTracker(
            "/dashboard",
            (page, ms) => beacons.push({ page, ms }),
            heartbeatMs,
            () => Date.now());
    }

    it("reports the full visit in one beacon when it is short", () => {
        const beacons: Beacon[] = [];
        const t = tracker(beacons);
        t.start();
        vi.advanceTimersByTime(5000);
        t.finish();
        expect(beacons.length).toBe(1);
        expect(beacons[0]).toEqual({ page: "/dashboard", ms: 5000 });
    });

    it("emits incremental heartbeats plus a final flush", () => {
        const beacons: Beacon[] = [];
        const t = tracker(beacons);
        t.start();
        vi.advanceTimersByTime(95_000);
        t.finish();
        expect(beacons.map((b) => b.ms)).toEqual([30000, 30000, 30000, 5000]);
        const total = beacons.reduce((acc, b) => acc + b.ms, 0);
        expect(total).toBe(95_000);
    });

    it("excludes hidden time from the tally", () => {
        const beacons: Beacon[] = [];
        const t = tracker(beacons, 3_600_000);
        t.start();
        vi.advanceTimersByTime(10_000);
        t.setVisible(false);
        vi.advanceTimersByTime(40_000);
        t.setVisible(true);
        vi.advanceTimersByTime(7_000);
        t.finish();
        const total = beacons.reduce((acc, b) => acc + b.ms, 0);
        expect(total).toBe(17_000);
    });

    it("never reports more than the wall-clock lifetime", () => {
        const beacons: Beacon[] = [];
        const t = tracker(beacons);
        const wallStart = Date.now();
        t.start();
        // a messy visit: repeated hide/show, redundant events
        vi.advanceTimersByTime(12_000);
        t.setVisible(false);
        t.setVisible(false);
        vi.advanceTimersByTime(3_000);
        t.setVisible(true);
        t.setVisible(true);
        vi.advanceTimersByTime(50_000);
        t.finish();
        t.finish();
        const wall = Date.now() - wallStart;
        const total = beacons.reduce((acc, b) => acc + b.ms, 0);
        expect(total).toBeLessThanOrEqual(wall);
        expect(total).toBe(62_000);
    });

    it("does not beacon again after finish", () => {
        const beacons: Beacon[] = [];
        const t = tracker(beacons);
        t.start();
        vi.advanceTimersByTime(4_000);
        t.finish();
        const count = beacons.length;
        vi.advanceTimersByTime(120_000);
        expect(beacons.length).toBe(count);
    });

    it("starts paused when the page opens hidden", () => {
        const beacons: Beacon[] = [];
        const t = tracker(beacons);
        t.start(false);
        vi.advanceTimersByTime(20_000);
        t.setVisible(true);
        vi.advanceTimersByTime(6_000);
        t.finish();
        const total = beacons.reduce((acc, b) => acc + b.ms, 0);
        expect(total).toBe(6_000);
    });

    it("swallows beacon sender failures", () => {
        const t = new DwellTracker(
            "/dashboard",
            () => { throw new Error("sendBeacon unavailable"); },
            30000,
            () => Date.now());
        t.start();
        vi.advanceTimersByTime(65_000);
        expect(() => t.finish()).not.toThrow();
    });
});
