/**
 * Typed client for the wallet service HTTP API. Every view drives exactly
 * one of these call sequences; no other network access happens in the app.
 */

export interface FactorSpec {
  id: string;
  type: string;
  params: Record<string, unknown>;
}

export interface AccountInfo {
  wallet_address: string;
  identifier: string | null;
  policy_version: number;
  disclosures: Record<string, Record<string, string>>;
}

export interface SessionInfo {
  session_id: string;
  wallet_address: string;
  expires_at: number;
  policy_version: number;
}

export interface PolicyFactor {
  factor_id: string;
  factor_type: string;
  entropy_bits: number;
  public_params: Record<string, unknown>;
}

export interface PolicyDocument {
  version: number;
  threshold_t: number;
  wallet_address: string;
  factors: PolicyFactor[];
}

export interface BalanceInfo {
  wallet_address: string;
  balance_units: number;
}

export interface TransferReceipt {
  from: string;
  to: string;
  amount: number;
  nonce: number;
}

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

export class NetworkError extends Error {}

type FetchLike = typeof fetch;

export class WalletApi {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (...args) => fetch(...args),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    sessionId?: string,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["content-type"] = "application/json";
    if (sessionId) headers["x-session-id"] = sessionId;
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new NetworkError(`wallet service unreachable: ${err}`);
    }
    if (response.status === 204) return undefined as T;
    const text = await response.text();
    const parsed = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ApiError(
        parsed.code ?? "error",
        parsed.message ?? response.statusText,
        response.status,
      );
    }
    return parsed as T;
  }

  signup(request: {
    password?: string;
    identifier?: string;
    factors?: FactorSpec[];
    threshold?: number;
    kdf_profile?: string;
  }): Promise<AccountInfo> {
    return this.request("POST", "/accounts", request);
  }

  login(
    identifier: string,
    witnesses: Record<string, string>,
  ): Promise<SessionInfo> {
    return this.request("POST", "/sessions", { identifier, witnesses });
  }

  logout(sessionId: string): Promise<void> {
    return this.request("DELETE", `/sessions/${sessionId}`);
  }

  policy(who: string): Promise<PolicyDocument> {
    return this.request("GET", `/policies/${who}`);
  }

  balance(who: string): Promise<BalanceInfo> {
    return this.request("GET", `/wallets/${who}/balance`);
  }

  send(
    sessionId: string,
    from: string,
    to: string,
    amountUnits: number,
  ): Promise<TransferReceipt> {
    return this.request(
      "POST",
      `/wallets/${from}/transfers`,
      { to, amount_units: amountUnits },
      sessionId,
    );
  }

  recoverFactor(
    sessionId: string,
    address: string,
    factorId: string,
    factor: FactorSpec,
  ): Promise<{ policy_version: number; disclosures: Record<string, Record<string, string>> }> {
    return this.request(
      "POST",
      `/wallets/${address}/factors/${factorId}`,
      { factor },
      sessionId,
    );
  }

  inboxLatest(email: string): Promise<{ email: string; code: string }> {
    return this.request("GET", `/dev/inbox/${encodeURIComponent(email)}`);
  }

  healthz(): Promise<{ status: string }> {
    return this.request("GET", "/healthz");
  }
}
