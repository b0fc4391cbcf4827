"""Terminal client for the wallet service.

Every service endpoint is reachable from here; secrets come from prompts or
environment variables, never argv. Exit codes: 2 usage, 3 authentication,
4 network unreachable, 5 store conflict, 1 anything else.
"""

import base64
import json
import os
import sys

import click
import httpx

from .errors import ValidationError
from .factors import SimulatedToken
from .mfkdf import parse, policy_entropy, verify_attestation
from .store.scenario import run_scenario_file

EXIT_AUTH = 3
EXIT_NETWORK = 4
EXIT_STORE = 5

AUTH_CODES = {"invalid_credentials", "threshold_not_met", "authentication_required"}
STORE_CODES = {"store_rejected", "invalid_attestation", "stale_document"}

# endpoint template -> commands that exercise it (kept current for the
# coverage test in the suite)
ENDPOINT_COVERAGE = {
    "POST /accounts": ["create"],
    "POST /sessions": ["login"],
    "DELETE /sessions/{session_id}": ["logout"],
    "POST /wallets/{address}/factors/{factor_id}": ["recover"],
    "GET /wallets/{address}/balance": ["balance"],
    "POST /wallets/{address}/transfers": ["send"],
    "GET /policies/{address}": ["inspect-policy", "login"],
    "GET /dev/inbox/{email}": ["inbox"],
    "POST /dev/faucet": ["faucet"],
    "GET /healthz": ["health"],
}


class CliState:
    def __init__(self, service_url: str, output_format: str, assume_yes: bool):
        self.service_url = service_url.rstrip("/")
        self.output_format = output_format
        self.assume_yes = assume_yes

    def request(self, method: str, path: str, **kwargs):
        try:
            response = httpx.request(
                method, self.service_url + path, timeout=30.0, **kwargs
            )
        except httpx.HTTPError as exc:
            click.echo(f"cannot reach wallet service: {exc}", err=True)
            sys.exit(EXIT_NETWORK)
        if response.status_code >= 400:
            try:
                body = response.json()
                code, message = body.get("code", "error"), body.get("message", "")
            except json.JSONDecodeError:
                code, message = "error", response.text
            click.echo(f"error [{code}]: {message}", err=True)
            if code in AUTH_CODES:
                sys.exit(EXIT_AUTH)
            if code in STORE_CODES:
                sys.exit(EXIT_STORE)
            sys.exit(1)
        return response

    def emit(self, payload: dict, human_lines: list[str]) -> None:
        if self.output_format == "structured":
            click.echo(json.dumps(payload, sort_keys=True))
        else:
            for line in human_lines:
                click.echo(line)


pass_state = click.make_pass_decorator(CliState)


@click.group()
@click.option(
    "--service-url",
    envvar="WALLET_SERVICE_URL",
    default="http://127.0.0.1:8710",
    show_default=True,
    help="Base URL of the wallet service.",
)
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["human", "structured"]),
    default="human",
    show_default=True,
)
@click.option("--yes", "assume_yes", is_flag=True, help="Never prompt interactively.")
@click.pass_context
def main(ctx, service_url, output_format, assume_yes):
    """Multi-factor derived wallet client."""
    ctx.obj = CliState(service_url, output_format, assume_yes)


def _password_from_env_or_prompt(state, password, prompt="Password"):
    if password is not None:
        return password
    env = os.environ.get("WALLET_PASSWORD")
    if env is not None:
        return env
    if state.assume_yes:
        raise click.UsageError("password required (set WALLET_PASSWORD or run interactively)")
    return click.prompt(prompt, hide_input=True)


@main.command()
@click.option("--identifier", help="Email identifier to bind to the wallet.")
@click.option("--kdf-profile", type=click.Choice(["production", "test"]), default=None)
@pass_state
def create(state, identifier, kdf_profile):
    """Create a wallet with the default password+token+recovery policy."""
    password = _password_from_env_or_prompt(state, None, "Choose a password")
    body = {"password": password}
    if identifier:
        body["identifier"] = identifier
    if kdf_profile:
        body["kdf_profile"] = kdf_profile
    account = state.request("POST", "/accounts", json=body).json()
    disclosures = account.get("disclosures", {})
    recovery = disclosures.get("recovery", {}).get("recovery_code", "")
    token_secret = disclosures.get("token", {}).get("token_secret_hex", "")
    state.emit(
        account,
        [
            f"wallet address: {account['wallet_address']}",
            f"identifier:     {account.get('identifier') or '(none)'}",
            f"policy version: {account['policy_version']}",
            "",
            "write these down; they are shown exactly once:",
            f"  recovery code: {recovery}",
            f"  token secret:  {token_secret}",
        ],
    )


def _token_response(state, who, token_secret_hex, token_id):
    policy_bytes = state.request("GET", f"/policies/{who}").content
    doc = parse(policy_bytes)
    entry = doc.entry(token_id)
    challenge = base64.urlsafe_b64decode(entry.public_params["challenge"])
    token = SimulatedToken(bytes.fromhex(token_secret_hex))
    return token.respond(challenge).hex()


@main.command()
@click.option("--who", required=True, help="Email identifier or hex wallet address.")
@click.option("--password", default=None, help="Password witness (prompted if omitted).")
@click.option("--no-password", is_flag=True, help="Log in without the password factor.")
@click.option("--recovery-code", default=None, help="Recovery code witness.")
@click.option("--token-secret-hex", default=None, envvar="WALLET_TOKEN_SECRET",
              help="Simulated token secret; the challenge response is computed locally.")
@click.option("--token-id", default="token", show_default=True)
@click.option("--witness", "extra_witnesses", multiple=True, metavar="ID=VALUE",
              help="Additional raw witness (repeatable).")
@pass_state
def login(state, who, password, no_password, recovery_code, token_secret_hex, token_id, extra_witnesses):
    """Open a session with any t of the wallet's factors."""
    witnesses = {}
    for item in extra_witnesses:
        if "=" not in item:
            raise click.UsageError(f"--witness takes ID=VALUE, got {item!r}")
        fid, value = item.split("=", 1)
        witnesses[fid] = value
    if recovery_code:
        witnesses["recovery"] = recovery_code
    if token_secret_hex:
        witnesses[token_id] = _token_response(state, who, token_secret_hex, token_id)
    if not no_password and "password" not in witnesses:
        witnesses["password"] = _password_from_env_or_prompt(state, password)
    elif password:
        witnesses["password"] = password
    session = state.request(
        "POST", "/sessions", json={"identifier": who, "witnesses": witnesses}
    ).json()
    state.emit(
        session,
        [
            f"session:        {session['session_id']}",
            f"wallet address: {session['wallet_address']}",
            f"policy version: {session['policy_version']}",
        ],
    )


@main.command()
@click.option("--session", required=True)
@pass_state
def logout(state, session):
    """Close a session and wipe its key material."""
    state.request("DELETE", f"/sessions/{session}")
    state.emit({"logged_out": True}, ["logged out"])


@main.command()
@click.option("--who", required=True, help="Email identifier or hex wallet address.")
@pass_state
def balance(state, who):
    """Show the on-chain balance."""
    result = state.request("GET", f"/wallets/{who}/balance").json()
    state.emit(
        result,
        [f"address: {result['wallet_address']}", f"balance: {result['balance_units']} units"],
    )


@main.command()
@click.option("--session", required=True)
@click.option("--to", "recipient", required=True, help="Recipient hex address.")
@click.option("--amount-units", required=True, type=int)
@pass_state
def send(state, session, recipient, amount_units):
    """Transfer funds from the logged-in wallet."""
    result = state.request(
        "POST",
        f"/wallets/{recipient}/transfers",
        json={"to": recipient, "amount_units": amount_units},
        headers={"x-session-id": session},
    ).json()
    state.emit(
        result,
        [
            f"sent {result['amount']} units",
            f"from {result['from']}",
            f"to   {result['to']}",
            f"nonce {result['nonce']}",
        ],
    )


@main.command()
@click.option("--session", required=True)
@click.option("--factor-id", required=True, help="Factor to replace.")
@click.option("--new-password", default=None, help="Replacement password factor.")
@click.option("--factor-json", default=None,
              help='Replacement spec as JSON: {"id":..,"type":..,"params":{..}}.')
@click.option("--address", required=True, help="Wallet hex address.")
@pass_state
def recover(state, session, factor_id, new_password, factor_json, address):
    """Replace a lost factor from within a logged-in session."""
    if (new_password is None) == (factor_json is None):
        raise click.UsageError("give exactly one of --new-password or --factor-json")
    if new_password is not None:
        factor = {"id": factor_id, "type": "password", "params": {"password": new_password}}
    else:
        factor = json.loads(factor_json)
    result = state.request(
        "POST",
        f"/wallets/{address}/factors/{factor_id}",
        json={"factor": factor},
        headers={"x-session-id": session},
    ).json()
    lines = [f"policy version: {result['policy_version']}"]
    for fid, info in result.get("disclosures", {}).items():
        for k, v in info.items():
            lines.append(f"  {fid}.{k}: {v}")
    state.emit(result, lines)


@main.command("inspect-policy")
@click.option("--who", required=True, help="Email identifier or hex wallet address.")
@pass_state
def inspect_policy(state, who):
    """Fetch a policy document, verify its attestation locally, summarize it."""
    data = state.request("GET", f"/policies/{who}").content
    doc = parse(data)
    valid = verify_attestation(doc)
    summary = {
        "wallet_address": doc.wallet_address.hex(),
        "version": doc.version,
        "threshold": doc.threshold_t,
        "factors": [
            {"id": f.factor_id, "type": f.factor_type, "entropy_bits": f.entropy_bits}
            for f in doc.factors
        ],
        "entropy_bits": policy_entropy(doc),
        "size_bytes": len(data),
        "attestation_valid": valid,
    }
    lines = [
        f"wallet address:    {summary['wallet_address']}",
        f"version:           {doc.version}",
        f"threshold:         {doc.threshold_t} of {len(doc.factors)}",
        f"policy entropy:    {summary['entropy_bits']:.2f} bits",
        f"document size:     {len(data)} bytes",
        f"attestation valid: {valid}",
        "factors:",
    ]
    lines += [
        f"  - {f.factor_id} ({f.factor_type}, {f.entropy_bits:g} bits)"
        for f in doc.factors
    ]
    state.emit(summary, lines)
    if not valid:
        sys.exit(EXIT_STORE)


@main.command()
@click.option("--email", required=True)
@pass_state
def inbox(state, email):
    """Read the latest OOBA code from the dev inbox."""
    result = state.request("GET", f"/dev/inbox/{email}").json()
    state.emit(result, [f"latest code for {result['email']}: {result['code']}"])


@main.command()
@click.option("--address", required=True, help="Wallet hex address to fund.")
@click.option("--amount-units", required=True, type=int)
@pass_state
def faucet(state, address, amount_units):
    """Credit test funds (dev service only)."""
    result = state.request(
        "POST", "/dev/faucet", json={"wallet_address": address, "amount_units": amount_units}
    ).json()
    state.emit(result, [f"balance of {address}: {result['balance_units']} units"])


@main.command()
@pass_state
def health(state):
    """Service health and simulation round."""
    result = state.request("GET", "/healthz").json()
    state.emit(result, [f"status {result['status']}, round {result['round']}"])


@main.command()
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False))
@pass_state
def simulate(state, scenario_file):
    """Run a network scenario file locally and emit its trace."""
    try:
        result = run_scenario_file(scenario_file)
    except (ValidationError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"bad scenario file: {exc}")
    if state.output_format == "structured":
        click.echo(json.dumps(result, sort_keys=True))
    else:
        click.echo(f"scenario: {result['name']}")
        for event in result["events"]:
            click.echo(f"  {json.dumps(event, sort_keys=True)}")
        click.echo(f"state hash: {result['state_hash']}")


if __name__ == "__main__":
    main()
