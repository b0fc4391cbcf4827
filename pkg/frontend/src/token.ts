/**
 * Simulated HMAC-SHA1 challenge-response token.
 *
 * Stands in for touching a hardware key: given the token secret the user
 * provisioned at signup and the challenge published in the policy
 * document, it computes the response a real token would emit. Key
 * derivation itself stays on the service; this only simulates the factor
 * hardware.
 */

export function hexToBytes(hex: string): Uint8Array {
  const clean = hex.trim().toLowerCase();
  if (!/^[0-9a-f]*$/.test(clean) || clean.length % 2 !== 0) {
    throw new Error("not a hex string");
  }
  const out = new Uint8Array(clean.length / 2);
  for (let i = 0; i < out.length; i++) {
    out[i] = parseInt(clean.slice(2 * i, 2 * i + 2), 16);
  }
  return out;
}

export function bytesToHex(bytes: Uint8Array): string {
  return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

export function base64UrlDecode(text: string): Uint8Array {
  const b64 = text.replace(/-/g, "+").replace(/_/g, "/");
  const raw = atob(b64);
  const out = new Uint8Array(raw.length);
  for (let i = 0; i < raw.length; i++) out[i] = raw.charCodeAt(i);
  return out;
}

export async function hmacSha1(key: Uint8Array, message: Uint8Array): Promise<Uint8Array> {
  const cryptoKey = await crypto.subtle.importKey(
    "raw",
    key as BufferSource,
    { name: "HMAC", hash: "SHA-1" },
    false,
    ["sign"],
  );
  const signature = await crypto.subtle.sign("HMAC", cryptoKey, message as BufferSource);
  return new Uint8Array(signature);
}

/** Response (hex) of the simulated token to a policy challenge. */
export async function tokenRespond(
  secretHex: string,
  challengeBase64Url: string,
): Promise<string> {
  const response = await hmacSha1(
    hexToBytes(secretHex),
    base64UrlDecode(challengeBase64Url),
  );
  return bytesToHex(response);
}
