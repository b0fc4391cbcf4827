/**
 * Application shell: banner, tab bar, and view switching. Session state
 * lives in memory only; a reload lands back on the login view.
 */

import { WalletApi } from "./api.js";
import { activeSession, closeSession, type UiSession } from "./session.js";
import {
  dashboardView,
  el,
  inboxView,
  loginView,
  recoveryView,
  signupView,
  type ViewContext,
} from "./views.js";

export interface AppOptions {
  root: HTMLElement;
  serviceUrl: string;
  devMode?: boolean;
  fetchFn?: typeof fetch;
  now?: () => number;
}

export class WalletApp {
  readonly api: WalletApi;
  private readonly root: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly outlet: HTMLElement;
  private readonly ctx: ViewContext;
  private lastIdentifier = "";

  constructor(options: AppOptions) {
    this.root = options.root;
    this.api = new WalletApi(options.serviceUrl, options.fetchFn);
    this.banner = el("div", { "data-testid": "banner", class: "banner" }, [""]);
    this.outlet = el("main", { "data-testid": "outlet" });
    const app = this;
    this.ctx = {
      api: this.api,
      devMode: options.devMode ?? false,
      now: options.now ?? (() => Date.now() / 1000),
      notify(kind, message) {
        app.banner.textContent = message;
        app.banner.setAttribute("data-kind", kind);
      },
      onLoggedIn(session) {
        app.ctx.notify("info", "");
        app.showDashboard(session);
      },
      onLoggedOut(reason) {
        closeSession();
        if (reason) app.ctx.notify("error", reason);
        app.showLogin();
      },
    };
  }

  start(): void {
    this.root.replaceChildren(
      el("h1", {}, ["mfwallet"]),
      this.banner,
      this.outlet,
    );
    const session = activeSession(this.ctx.now);
    if (session) this.showDashboard(session);
    else this.showLogin();
  }

  private show(...nodes: HTMLElement[]): void {
    this.outlet.replaceChildren(...nodes);
  }

  showLogin(): void {
    const toSignup = el("button", { "data-testid": "nav-signup" }, [
      "Create a new wallet",
    ]);
    toSignup.addEventListener("click", () => this.showSignup());
    this.show(loginView(this.ctx, this.lastIdentifier), toSignup);
  }

  showSignup(): void {
    this.show(
      signupView(this.ctx, (account) => {
        this.lastIdentifier = account.identifier ?? account.wallet_address;
        this.ctx.notify("info", "wallet created; log in with any two factors");
        this.showLogin();
      }),
    );
  }

  showDashboard(session: UiSession): void {
    const tabs = el("nav", {}, []);
    const dashboard = el("button", { "data-testid": "nav-dashboard" }, ["Dashboard"]);
    dashboard.addEventListener("click", () => this.showDashboard(session));
    tabs.append(dashboard);
    const recovery = el("button", { "data-testid": "nav-recovery" }, ["Recovery"]);
    recovery.addEventListener("click", () =>
      this.show(tabs, recoveryView(this.ctx, session)),
    );
    tabs.append(recovery);
    if (this.ctx.devMode) {
      const inbox = el("button", { "data-testid": "nav-inbox" }, ["Dev inbox"]);
      inbox.addEventListener("click", () => this.show(tabs, inboxView(this.ctx)));
      tabs.append(inbox);
    }
    this.show(tabs, dashboardView(this.ctx, session));
  }
}

export function bootstrap(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const params = new URLSearchParams(window.location.search);
  const app = new WalletApp({
    root,
    serviceUrl: params.get("service") ?? window.location.origin,
    devMode: params.get("dev") === "1",
  });
  app.start();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  bootstrap();
}
