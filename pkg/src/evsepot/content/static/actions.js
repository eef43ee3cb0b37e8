// Stop / Pause / Resume buttons. One click, one request: buttons stay
// disabled while a request is in flight, and errors surface only as the
// device-styled message line.
export async function sendAction(fetchFn, kind, sessionId) {
    try {
        const resp = await fetchFn("/api/action", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ kind, session_id: sessionId }),
        });
        let body = {};
        try {
            body = await resp.json();
        }
        catch {
            // non-JSON error body; fall through to the generic message
        }
        if (resp.ok && body.ok === true) {
            return { ok: true, message: "" };
        }
        const reason = typeof body.error === "string"
            ? body.error : `error ${resp.status}`;
        return { ok: false, message: `Operation refused: ${reason}` };
    }
    catch {
        return { ok: false, message: "Controller not responding. Retry." };
    }
}
export function wireActionButtons(fetchFn, wiring) {
    let inFlight = false;
    for (const button of wiring.buttons) {
        button.addEventListener("click", () => {
            if (inFlight)
                return;
            const kind = button.dataset.kind;
            const sessionId = wiring.selectSession();
            if (!kind || !sessionId)
                return;
            inFlight = true;
            for (const b of wiring.buttons)
                b.disabled = true;
            void sendAction(fetchFn, kind, sessionId).then((result) => {
                if (wiring.messageEl) {
                    wiring.messageEl.textContent = result.message;
                }
                inFlight = false;
                for (const b of wiring.buttons)
                    b.disabled = false;
                wiring.onDone();
            });
        });
    }
}
