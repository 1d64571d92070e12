/**
 * Fixed-point formatting that reproduces the reference scorer's 6-decimal
 * score column byte for byte.
 *
 * The reference formats the IEEE double edits/ref_len with round-half-even
 * on the double's exact decimal expansion.  Number.prototype.toFixed rounds
 * half away from zero instead, so exact ties at the seventh digit (possible
 * when ref_len is a multiple of a power of two) would diverge.  This
 * implementation decomposes the double and rounds its exact value with
 * BigInt arithmetic.
 */

const VIEW = new DataView(new ArrayBuffer(8));

export function format6(x: number): string {
  if (!Number.isFinite(x) || x < 0) {
    throw new Error(`format6 expects a finite non-negative number, got ${x}`);
  }
  if (x === 0) return "0.000000";
  VIEW.setFloat64(0, x);
  const bits = VIEW.getBigUint64(0);
  const rawExp = Number((bits >> 52n) & 0x7ffn);
  let mant = bits & 0xfffffffffffffn;
  let exp: number;
  if (rawExp === 0) {
    exp = 1 - 1075; // subnormal
  } else {
    mant |= 0x10000000000000n;
    exp = rawExp - 1075;
  }
  // x * 10^6 = mant * 10^6 * 2^exp, exactly
  const scaled = mant * 1000000n;
  let q: bigint;
  if (exp >= 0) {
    q = scaled << BigInt(exp);
  } else {
    const shift = BigInt(-exp);
    q = scaled >> shift;
    const rem = scaled & ((1n << shift) - 1n);
    const twice = rem << 1n;
    const denom = 1n << shift;
    if (twice > denom || (twice === denom && (q & 1n) === 1n)) {
      q += 1n;
    }
  }
  const digits = q.toString().padStart(7, "0");
  return `${digits.slice(0, -6)}.${digits.slice(-6)}`;
}
