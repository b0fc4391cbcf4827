import { describe, expect, it } from "vitest";

import { ApiError, NetworkError, WalletApi } from "../src/api.js";

interface Captured {
  url: string;
  method: string;
  headers: Record<string, string>;
  body: unknown;
}

function captureFetch(status: number, payload: unknown) {
  const calls: Captured[] = [];
  const fetchFn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    calls.push({
      url: String(input),
      method: init?.method ?? "GET",
      headers: (init?.headers as Record<string, string>) ?? {},
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    return new Response(status === 204 ? null : JSON.stringify(payload), {
      status,
      headers: { "content-type": "application/json" },
    });
  }) as typeof fetch;
  return { calls, fetchFn };
}

describe("WalletApi", () => {
  it("posts signup bodies to /accounts", async () => {
    const { calls, fetchFn } = captureFetch(201, {
      wallet_address: "aa".repeat(20),
      identifier: null,
      policy_version: 1,
      disclosures: {},
    });
    const api = new WalletApi("http://svc:1/", fetchFn);
    await api.signup({ password: "pw", identifier: "a@b.co" });
    expect(calls[0]).toMatchObject({
      url: "http://svc:1/accounts",
      method: "POST",
      body: { password: "pw", identifier: "a@b.co" },
    });
  });

  it("sends witnesses on login and session header on transfers", async () => {
    const { calls, fetchFn } = captureFetch(201, {
      session_id: "s1",
      wallet_address: "bb".repeat(20),
      expires_at: 1,
      policy_version: 2,
    });
    const api = new WalletApi("http://svc:1", fetchFn);
    await api.login("user@example.com", { password: "x", token: "ff" });
    expect(calls[0]).toMatchObject({
      url: "http://svc:1/sessions",
      body: {
        identifier: "user@example.com",
        witnesses: { password: "x", token: "ff" },
      },
    });
    await api.send("s1", "aa".repeat(20), "bb".repeat(20), 5);
    expect(calls[1]).toMatchObject({
      url: `http://svc:1/wallets/${"aa".repeat(20)}/transfers`,
      method: "POST",
      body: { to: "bb".repeat(20), amount_units: 5 },
    });
    expect(calls[1]!.headers["x-session-id"]).toBe("s1");
  });

  it("raises ApiError with the service code", async () => {
    const { fetchFn } = captureFetch(401, {
      code: "invalid_credentials",
      message: "invalid credentials",
    });
    const api = new WalletApi("http://svc:1", fetchFn);
    const err = await api.login("a", { p: "x" }).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("invalid_credentials");
    expect(err.status).toBe(401);
  });

  it("wraps transport failures as NetworkError", async () => {
    const api = new WalletApi("http://svc:1", (async () => {
      throw new TypeError("connect ECONNREFUSED");
    }) as typeof fetch);
    const err = await api.healthz().catch((e) => e);
    expect(err).toBeInstanceOf(NetworkError);
  });

  it("handles 204 logout responses", async () => {
    const { calls, fetchFn } = captureFetch(204, null);
    const api = new WalletApi("http://svc:1", fetchFn);
    await api.logout("s1");
    expect(calls[0]).toMatchObject({
      url: "http://svc:1/sessions/s1",
      method: "DELETE",
    });
  });
});
