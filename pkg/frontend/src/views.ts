/**
 * The five views of the wallet: signup, login, dashboard, recovery and the
 * dev inbox. Plain DOM, no framework; each view maps onto one service API
 * sequence and reports failures through the shared banner.
 */

import { ApiError, NetworkError, WalletApi } from "./api.js";
import type { AccountInfo } from "./api.js";
import { openSession, remainingSeconds, type UiSession } from "./session.js";
import { tokenRespond } from "./token.js";

export interface ViewContext {
  api: WalletApi;
  devMode: boolean;
  now: () => number;
  notify(kind: "error" | "info", message: string): void;
  onLoggedIn(session: UiSession): void;
  onLoggedOut(reason?: string): void;
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  for (const child of children) node.append(child);
  return node;
}

function labeledInput(
  label: string,
  testId: string,
  type = "text",
  placeholder = "",
): { wrapper: HTMLElement; input: HTMLInputElement } {
  const input = el("input", { type, "data-testid": testId, placeholder });
  const wrapper = el("label", { class: "field" }, [label, input]);
  return { wrapper, input };
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    if (err.code === "invalid_credentials") return "invalid credentials";
    if (err.code === "threshold_not_met") return "at least two factors are required";
    return `${err.message} [${err.code}]`;
  }
  if (err instanceof NetworkError) return "wallet service unreachable";
  return String(err);
}

// -- signup -------------------------------------------------------------------

export function signupView(
  ctx: ViewContext,
  onDone: (account: AccountInfo) => void,
): HTMLElement {
  const root = el("section", { "data-testid": "signup-view" }, [
    el("h2", {}, ["Create wallet"]),
  ]);
  const identifier = labeledInput("Email (optional identifier)", "signup-identifier", "email");
  const password = labeledInput("Password", "signup-password", "password");
  const confirm = labeledInput("Confirm password", "signup-confirm", "password");
  const submit = el("button", { "data-testid": "signup-submit" }, ["Sign up"]);
  const form = el("form", {}, [
    identifier.wrapper,
    password.wrapper,
    confirm.wrapper,
    submit,
  ]);
  root.append(form);

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    if (!password.input.value) {
      ctx.notify("error", "password must not be empty");
      return;
    }
    if (password.input.value !== confirm.input.value) {
      ctx.notify("error", "passwords do not match");
      return;
    }
    submit.disabled = true;
    try {
      const account = await ctx.api.signup({
        password: password.input.value,
        identifier: identifier.input.value || undefined,
      });
      form.replaceWith(disclosurePanel(account, onDone));
    } catch (err) {
      ctx.notify("error", describeError(err));
      submit.disabled = false;
    }
  });
  return root;
}

/** One-time display of the recovery code and token secret, gated by an
 * explicit confirmation step. */
function disclosurePanel(
  account: AccountInfo,
  onDone: (account: AccountInfo) => void,
): HTMLElement {
  const recovery = account.disclosures["recovery"]?.["recovery_code"] ?? "";
  const tokenSecret = account.disclosures["token"]?.["token_secret_hex"] ?? "";
  const confirmBox = el("input", { type: "checkbox", "data-testid": "disclosure-confirm" });
  const proceed = el("button", { "data-testid": "disclosure-continue", disabled: "" }, [
    "Continue to login",
  ]);
  confirmBox.addEventListener("change", () => {
    proceed.disabled = !confirmBox.checked;
  });
  proceed.addEventListener("click", () => onDone(account));
  return el("div", { "data-testid": "signup-disclosures" }, [
    el("h3", {}, ["Wallet created"]),
    el("p", {}, ["Address: ", el("code", { "data-testid": "signup-address" }, [account.wallet_address])]),
    el("p", {}, ["These are shown exactly once. Store them safely:"]),
    el("dl", {}, [
      el("dt", {}, ["Recovery code"]),
      el("dd", {}, [el("code", { "data-testid": "signup-recovery-code" }, [recovery])]),
      el("dt", {}, ["Token secret"]),
      el("dd", {}, [el("code", { "data-testid": "signup-token-secret" }, [tokenSecret])]),
    ]),
    el("label", {}, [confirmBox, " I wrote down the recovery code and token secret"]),
    proceed,
  ]);
}

// -- login ---------------------------------------------------------------------

export function loginView(ctx: ViewContext, prefillIdentifier = ""): HTMLElement {
  const root = el("section", { "data-testid": "login-view" }, [
    el("h2", {}, ["Log in"]),
    el("p", {}, ["Provide your identifier and any two factors."]),
  ]);
  const who = labeledInput("Email or wallet address", "login-identifier");
  who.input.value = prefillIdentifier;
  const password = labeledInput("Password", "login-password", "password");
  const tokenSecret = labeledInput(
    "Token secret (simulated key, hex)",
    "login-token-secret",
    "password",
  );
  const tokenResponse = labeledInput(
    "Token response (paste, hex)",
    "login-token-response",
  );
  const recovery = labeledInput("Recovery code", "login-recovery");
  const ooba = labeledInput("Email code", "login-ooba");
  const submit = el("button", { "data-testid": "login-submit" }, ["Log in"]);
  const form = el("form", {}, [
    who.wrapper,
    password.wrapper,
    tokenSecret.wrapper,
    tokenResponse.wrapper,
    recovery.wrapper,
    ooba.wrapper,
    submit,
  ]);
  root.append(form);

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    submit.disabled = true;
    try {
      const witnesses: Record<string, string> = {};
      if (password.input.value) witnesses["password"] = password.input.value;
      if (recovery.input.value) witnesses["recovery"] = recovery.input.value.trim();
      if (ooba.input.value) witnesses["mail"] = ooba.input.value.trim();
      if (tokenResponse.input.value) {
        witnesses["token"] = tokenResponse.input.value.trim();
      } else if (tokenSecret.input.value) {
        const policy = await ctx.api.policy(who.input.value.trim());
        const tokenFactor = policy.factors.find((f) => f.factor_type === "hmac_token");
        if (!tokenFactor) throw new Error("this wallet has no token factor");
        witnesses[tokenFactor.factor_id] = await tokenRespond(
          tokenSecret.input.value.trim(),
          String(tokenFactor.public_params["challenge"]),
        );
      }
      const info = await ctx.api.login(who.input.value.trim(), witnesses);
      ctx.onLoggedIn(openSession(info));
    } catch (err) {
      ctx.notify("error", describeError(err));
      submit.disabled = false;
    }
  });
  return root;
}

// -- dashboard -------------------------------------------------------------------

export function dashboardView(ctx: ViewContext, session: UiSession): HTMLElement {
  const balanceValue = el("span", { "data-testid": "balance-units" }, ["…"]);
  const countdown = el("span", { "data-testid": "session-countdown" }, [
    String(remainingSeconds(session, ctx.now)),
  ]);
  const feedback = el("p", { "data-testid": "transfer-feedback" }, [""]);
  const recipient = labeledInput("Recipient address (hex)", "send-to");
  const amount = labeledInput("Amount (units)", "send-amount", "number");
  const sendButton = el("button", { "data-testid": "send-submit" }, ["Send"]);
  const sendForm = el("form", {}, [recipient.wrapper, amount.wrapper, sendButton]);
  const refresh = el("button", { "data-testid": "balance-refresh" }, ["Refresh"]);
  const logout = el("button", { "data-testid": "logout" }, ["Log out"]);

  const root = el("section", { "data-testid": "dashboard-view" }, [
    el("h2", {}, ["Wallet"]),
    el("p", {}, [
      "Address: ",
      el("code", { "data-testid": "wallet-address" }, [session.walletAddress]),
    ]),
    el("p", {}, ["Balance: ", balanceValue, " units ", refresh]),
    el("p", {}, ["Session expires in ", countdown, " s"]),
    el("h3", {}, ["Send"]),
    sendForm,
    feedback,
    logout,
  ]);

  async function loadBalance(): Promise<void> {
    try {
      const info = await ctx.api.balance(session.walletAddress);
      balanceValue.textContent = String(info.balance_units);
    } catch (err) {
      ctx.notify("error", describeError(err));
    }
  }
  void loadBalance();
  refresh.addEventListener("click", () => void loadBalance());

  const ticker = setInterval(() => {
    const left = remainingSeconds(session, ctx.now);
    countdown.textContent = String(left);
    if (left <= 0) {
      clearInterval(ticker);
      ctx.onLoggedOut("session expired");
    }
  }, 1000);

  sendForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    sendButton.disabled = true;
    feedback.textContent = "";
    try {
      const receipt = await ctx.api.send(
        session.sessionId,
        session.walletAddress,
        recipient.input.value.trim(),
        Number(amount.input.value),
      );
      feedback.textContent = `sent ${receipt.amount} units to ${receipt.to} (nonce ${receipt.nonce})`;
      await loadBalance();
    } catch (err) {
      feedback.textContent = describeError(err);
    } finally {
      sendButton.disabled = false;
    }
  });

  logout.addEventListener("click", async () => {
    clearInterval(ticker);
    try {
      await ctx.api.logout(session.sessionId);
    } catch {
      // session wipe is local-first; service cleanup is best effort
    }
    ctx.onLoggedOut();
  });
  return root;
}

// -- recovery -------------------------------------------------------------------

export function recoveryView(ctx: ViewContext, session: UiSession): HTMLElement {
  const root = el("section", { "data-testid": "recovery-view" }, [
    el("h2", {}, ["Replace a lost factor"]),
  ]);
  const factorId = labeledInput("Factor to replace", "recovery-factor-id");
  factorId.input.value = "password";
  const newPassword = labeledInput("New password", "recovery-new-password", "password");
  const submit = el("button", { "data-testid": "recovery-submit" }, ["Replace factor"]);
  const outcome = el("p", { "data-testid": "recovery-outcome" }, [""]);
  const form = el("form", {}, [factorId.wrapper, newPassword.wrapper, submit, outcome]);
  root.append(form);

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    submit.disabled = true;
    try {
      const result = await ctx.api.recoverFactor(
        session.sessionId,
        session.walletAddress,
        factorId.input.value.trim(),
        {
          id: factorId.input.value.trim(),
          type: "password",
          params: { password: newPassword.input.value },
        },
      );
      outcome.textContent = `factor replaced; policy version ${result.policy_version}`;
      ctx.notify("info", "factor replaced");
    } catch (err) {
      outcome.textContent = describeError(err);
    } finally {
      submit.disabled = false;
    }
  });
  return root;
}

// -- dev inbox -------------------------------------------------------------------

export function inboxView(ctx: ViewContext): HTMLElement {
  const root = el("section", { "data-testid": "inbox-view" }, [
    el("h2", {}, ["Dev inbox"]),
  ]);
  const email = labeledInput("Email address", "inbox-email", "email");
  const lookup = el("button", { "data-testid": "inbox-lookup" }, ["Fetch latest code"]);
  const code = el("code", { "data-testid": "inbox-code" }, [""]);
  root.append(el("form", {}, [email.wrapper, lookup]), el("p", {}, ["Latest code: ", code]));
  root.querySelector("form")!.addEventListener("submit", async (event) => {
    event.preventDefault();
    try {
      const result = await ctx.api.inboxLatest(email.input.value.trim());
      code.textContent = result.code;
    } catch (err) {
      ctx.notify("error", describeError(err));
    }
  });
  return root;
}
