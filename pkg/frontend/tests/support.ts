/** Shared test utilities: DOM helpers and a fake in-process service. */

import { expect } from "vitest";

export function $(testId: string, root: ParentNode = document): HTMLElement {
  const node = root.querySelector(`[data-testid="${testId}"]`);
  expect(node, `missing [data-testid=${testId}]`).not.toBeNull();
  return node as HTMLElement;
}

export function maybe$(testId: string, root: ParentNode = document): HTMLElement | null {
  return root.querySelector(`[data-testid="${testId}"]`) as HTMLElement | null;
}

export function setInput(testId: string, value: string): void {
  const input = $(testId) as HTMLInputElement;
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

export function submitFormOf(testId: string): void {
  const button = $(testId);
  const form = button.closest("form");
  expect(form, `no form around ${testId}`).not.toBeNull();
  form!.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

export function click(testId: string): void {
  $(testId).dispatchEvent(new Event("click", { bubbles: true }));
}

export async function waitFor<T>(
  probe: () => T | null | undefined | false,
  what: string,
  timeoutMs = 15_000,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const value = probe();
    if (value) return value;
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

/** Minimal stateful fake of the wallet service for offline UI tests. */
export function fakeServiceFetch() {
  const address = "ab".repeat(20);
  const state = {
    version: 1,
    balance: 0,
    sessions: new Set<string>(),
    lastWitnesses: {} as Record<string, string>,
    password: "initial pass",
  };
  const challenge = Buffer.from(new Uint8Array(64).fill(7)).toString("base64url");

  const fetchFn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = new URL(String(input));
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : {};
    const json = (status: number, payload: unknown) =>
      new Response(JSON.stringify(payload), { status });

    if (method === "POST" && url.pathname === "/accounts") {
      return json(201, {
        wallet_address: address,
        identifier: body.identifier ?? null,
        policy_version: state.version,
        disclosures: {
          recovery: { recovery_code: "11111111-1111-4111-8111-111111111111" },
          token: { token_secret_hex: "0b".repeat(20) },
        },
      });
    }
    if (method === "GET" && url.pathname.startsWith("/policies/")) {
      return json(200, {
        version: state.version,
        threshold_t: 2,
        wallet_address: address,
        factors: [
          { factor_id: "password", factor_type: "password", entropy_bits: 40, public_params: {} },
          { factor_id: "token", factor_type: "hmac_token", entropy_bits: 160, public_params: { challenge } },
          { factor_id: "recovery", factor_type: "recovery_code", entropy_bits: 122, public_params: {} },
        ],
      });
    }
    if (method === "POST" && url.pathname === "/sessions") {
      const witnesses = body.witnesses as Record<string, string>;
      state.lastWitnesses = witnesses;
      if (witnesses["password"] && witnesses["password"] !== state.password) {
        return json(401, { code: "invalid_credentials", message: "invalid credentials" });
      }
      if (Object.keys(witnesses).length < 2) {
        return json(401, { code: "threshold_not_met", message: "threshold not met" });
      }
      state.version += 1;
      const sessionId = `session-${state.sessions.size + 1}`;
      state.sessions.add(sessionId);
      return json(201, {
        session_id: sessionId,
        wallet_address: address,
        expires_at: Date.now() / 1000 + 900,
        policy_version: state.version,
      });
    }
    if (method === "DELETE" && url.pathname.startsWith("/sessions/")) {
      state.sessions.delete(url.pathname.split("/").pop()!);
      return new Response(null, { status: 204 });
    }
    if (method === "GET" && url.pathname.endsWith("/balance")) {
      return json(200, { wallet_address: address, balance_units: state.balance });
    }
    if (method === "POST" && url.pathname.endsWith("/transfers")) {
      if (body.amount_units > state.balance) {
        return json(409, { code: "insufficient_funds", message: "balance too low" });
      }
      state.balance -= body.amount_units;
      return json(201, { from: address, to: body.to, amount: body.amount_units, nonce: 1 });
    }
    if (method === "POST" && /\/factors\//.test(url.pathname)) {
      state.password = body.factor.params.password;
      state.version += 1;
      return json(200, { policy_version: state.version, disclosures: {} });
    }
    if (url.pathname === "/healthz") return json(200, { status: "ok" });
    if (url.pathname.startsWith("/dev/inbox/")) {
      return json(200, { email: "x@y.z", code: "123456" });
    }
    return json(404, { code: "not_found", message: url.pathname });
  }) as typeof fetch;

  return { fetchFn, state, address };
}
