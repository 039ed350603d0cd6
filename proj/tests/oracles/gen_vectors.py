#!/usr/bin/env python3
"""Independent oracle for the frozen test vectors in tests/vectors.hpp.

Recomputes every expected value with the pyca/cryptography stack (a code
path unrelated to the C++ implementation) and cross-checks the published
conformance vectors before emitting them. Run from the repo root:

    python3 tests/oracles/gen_vectors.py > /tmp/vectors_report.txt

Any published vector that does not reproduce under the oracle is dropped
with a loud FAIL line instead of being emitted.
"""

import struct
import sys

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives import cmac, hashes, hmac


def h2b(s: str) -> bytes:
    return bytes.fromhex(s.replace(" ", "").replace("\n", ""))


def uu_header(count: int, bearer: int, direction: int) -> bytes:
    # COUNT(32) | BEARER(5) | DIRECTION(1) | 26 zero bits
    if bearer >= 32 or direction not in (0, 1):
        raise ValueError("bad bearer/direction")
    word = (bearer << 27) | (direction << 26)
    return struct.pack(">II", count & 0xFFFFFFFF, word)


def nea2(key: bytes, count: int, bearer: int, direction: int, data: bytes) -> bytes:
    iv = uu_header(count, bearer, direction) + b"\x00" * 8
    enc = Cipher(algorithms.AES(key), modes.CTR(iv)).encryptor()
    return enc.update(data) + enc.finalize()


def nia2(key: bytes, count: int, bearer: int, direction: int, msg: bytes) -> bytes:
    c = cmac.CMAC(algorithms.AES(key))
    c.update(uu_header(count, bearer, direction) + msg)
    return c.finalize()[:4]


def mask_tail_bits(data: bytes, bit_len: int) -> bytes:
    """Zero every bit past bit_len (conformance data is given padded to bytes)."""
    out = bytearray(data)
    full, rem = divmod(bit_len, 8)
    if rem:
        out[full] &= (0xFF << (8 - rem)) & 0xFF
        full += 1
    for i in range(full, len(out)):
        out[i] = 0
    return bytes(out)


failures = []


def check(name: str, got: bytes, want: bytes):
    ok = got == want
    print(f"{'PASS' if ok else 'FAIL'} {name}")
    if not ok:
        print(f"  got  {got.hex()}")
        print(f"  want {want.hex()}")
        failures.append(name)


# ---------------------------------------------------------------- NEA2 / 128-EEA2
# Published conformance sets (TS 33.401 Annex C.1 data; NEA2 reuses the
# construction with identical COUNT/BEARER/DIRECTION inputs).
EEA2_SETS = [
    dict(
        name="EEA2 set 1",
        key="d3c5d592327fb11c4035c6680af8c6d1",
        count=0x398A59B4, bearer=0x15, direction=1, bits=253,
        pt="981ba6824c1bfb1ab485472029b71d808ce33e2cc3c0b5fc1f3de8a6dc66b1f0",
        ct="e9fed8a63d155304d71df20bf3e82214b20ed7dad2f233dc3c22d7bdeeed8e78",
    ),
]

emitted_eea2 = []
for s in EEA2_SETS:
    key, pt, want = h2b(s["key"]), h2b(s["pt"]), h2b(s["ct"])
    got = mask_tail_bits(nea2(key, s["count"], s["bearer"], s["direction"], pt), s["bits"])
    check(s["name"], got, mask_tail_bits(want, s["bits"]))
    if got == mask_tail_bits(want, s["bits"]):
        emitted_eea2.append((s, got))

# ---------------------------------------------------------------- NIA2 / 128-EIA2
# Byte-aligned published sets only (the C++ API is byte-oriented).
EIA2_SETS = [
    dict(
        name="EIA2 set 2",
        key="d3c5d592327fb11c4035c6680af8c6d1",
        count=0x398A59B4, bearer=0x1A, direction=1,
        msg="484583d5afe082ae", mac="b93787e6",
    ),
]

emitted_eia2 = []
for s in EIA2_SETS:
    got = nia2(h2b(s["key"]), s["count"], s["bearer"], s["direction"], h2b(s["msg"]))
    check(s["name"], got, h2b(s["mac"]))
    if got == h2b(s["mac"]):
        emitted_eia2.append((s, got))

# Supplementary oracle-generated NIA2/NEA2 vectors over fixed inputs, to widen
# coverage beyond the byte-aligned published sets.
SUPP = []
for i, (count, bearer, direction, msg_len) in enumerate(
    [(0, 0, 0, 0), (1, 31, 1, 1), (0xDEADBEEF, 7, 0, 64), (0xFFFFFFFF, 31, 1, 129)]
):
    key = bytes((i * j + 17) % 251 for j in range(16))
    msg = bytes((3 * j + i) % 256 for j in range(msg_len))
    SUPP.append(
        dict(key=key, count=count, bearer=bearer, direction=direction, msg=msg,
             mac=nia2(key, count, bearer, direction, msg),
             ks=nea2(key, count, bearer, direction, msg))
    )

# ---------------------------------------------------------------- AES-GCM KATs
GCM_SETS = [
    dict(  # McGrew-Viega test case 3 (AES-128, no AAD)
        name="GCM-128 KAT (no aad)",
        key="feffe9928665731c6d6a8f9467308308",
        iv="cafebabefacedbaddecaf888",
        pt="d9313225f88406e5a55909c5aff5269a86a7a9531534f7da2e4c303d8a318a72"
           "1c3c0c95956809532fcf0e2449a6b525b16aedf5aa0de657ba637b391aafd255",
        aad="",
        ct="42831ec2217774244b7221b784d0d49ce3aa212f2c02a4e035c17e2329aca12e"
           "21d514b25466931c7d8f6a5aac84aa051ba30b396a0aac973d58e091473f5985",
        tag="4d5c2af327cd64a62cf35abd2ba6fab4",
    ),
    dict(  # McGrew-Viega test case 4 (AES-128, with AAD)
        name="GCM-128 KAT (aad)",
        key="feffe9928665731c6d6a8f9467308308",
        iv="cafebabefacedbaddecaf888",
        pt="d9313225f88406e5a55909c5aff5269a86a7a9531534f7da2e4c303d8a318a72"
           "1c3c0c95956809532fcf0e2449a6b525b16aedf5aa0de657ba637b39",
        aad="feedfacedeadbeeffeedfacedeadbeefabaddad2",
        ct="42831ec2217774244b7221b784d0d49ce3aa212f2c02a4e035c17e2329aca12e"
           "21d514b25466931c7d8f6a5aac84aa051ba30b396a0aac973d58e091",
        tag="5bc94fbc3221a5db94fae95ae7121a47",
    ),
    dict(  # McGrew-Viega test case 15 (AES-256, no AAD)
        name="GCM-256 KAT (no aad)",
        key="feffe9928665731c6d6a8f9467308308feffe9928665731c6d6a8f9467308308",
        iv="cafebabefacedbaddecaf888",
        pt="d9313225f88406e5a55909c5aff5269a86a7a9531534f7da2e4c303d8a318a72"
           "1c3c0c95956809532fcf0e2449a6b525b16aedf5aa0de657ba637b391aafd255",
        aad="",
        ct="522dc1f099567d07f47f37a32a84427d643a8cdcbfe5c0c97598a2bd2555d1aa"
           "8cb08e48590dbb3da7b08b1056828838c5f61e6393ba7a0abcc9f662898015ad",
        tag="b094dac5d93471bdec1a502270e3cc6c",
    ),
    dict(  # McGrew-Viega test case 16 (AES-256, with AAD)
        name="GCM-256 KAT (aad)",
        key="feffe9928665731c6d6a8f9467308308feffe9928665731c6d6a8f9467308308",
        iv="cafebabefacedbaddecaf888",
        pt="d9313225f88406e5a55909c5aff5269a86a7a9531534f7da2e4c303d8a318a72"
           "1c3c0c95956809532fcf0e2449a6b525b16aedf5aa0de657ba637b39",
        aad="feedfacedeadbeeffeedfacedeadbeefabaddad2",
        ct="522dc1f099567d07f47f37a32a84427d643a8cdcbfe5c0c97598a2bd2555d1aa"
           "8cb08e48590dbb3da7b08b1056828838c5f61e6393ba7a0abcc9f662",
        tag="76fc6ece0f4e1768cddf8853bb2d551b",
    ),
]

emitted_gcm = []
for s in GCM_SETS:
    key, iv, pt, aad = h2b(s["key"]), h2b(s["iv"]), h2b(s["pt"]), h2b(s["aad"])
    out = AESGCM(key).encrypt(iv, pt, aad if aad else None)
    got_ct, got_tag = out[:-16], out[-16:]
    ct4 = h2b(s["ct"])[: len(pt)]
    check(s["name"] + " ct", got_ct, ct4)
    check(s["name"] + " tag", got_tag, h2b(s["tag"]))
    if got_ct == ct4 and got_tag == h2b(s["tag"]):
        emitted_gcm.append((s, got_ct, got_tag))

# ---------------------------------------------------------------- HMAC-SHA-256
HMAC_SETS = [
    dict(name="HMAC-SHA256 RFC4231 tc1", key="0b" * 20, data=b"Hi There",
         mac="b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7"),
    dict(name="HMAC-SHA256 RFC4231 tc2", key="4a656665",
         data=b"what do ya want for nothing?",
         mac="5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843"),
]
emitted_hmac = []
for s in HMAC_SETS:
    m = hmac.HMAC(h2b(s["key"]), hashes.SHA256())
    m.update(s["data"])
    got = m.finalize()
    check(s["name"], got, h2b(s["mac"]))
    if got == h2b(s["mac"]):
        emitted_hmac.append((s, got))

# ---------------------------------------------------------------- AES-CMAC (RFC 4493)
CMAC_SETS = [
    dict(name="CMAC RFC4493 empty", msg="", mac="bb1d6929e95937287fa37d129b756746"),
    dict(name="CMAC RFC4493 16B", msg="6bc1bee22e409f96e93d7e117393172a",
         mac="070a16b46b4d4144f79bdd9dd04a287c"),
    dict(name="CMAC RFC4493 40B",
         msg="6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
             "30c81c46a35ce411",
         mac="dfa66747de9ae63030ca32611497c827"),
    dict(name="CMAC RFC4493 64B",
         msg="6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
             "30c81c46a35ce411e5fbc1191a0a52eff69f2445df4f9b17ad2b417be66c3710",
         mac="51f0bebf7e3b9d92fc49741779363cfe"),
]
CMAC_KEY = h2b("2b7e151628aed2a6abf7158809cf4f3c")
emitted_cmac = []
for s in CMAC_SETS:
    c = cmac.CMAC(algorithms.AES(CMAC_KEY))
    c.update(h2b(s["msg"]))
    got = c.finalize()
    check(s["name"], got, h2b(s["mac"]))
    if got == h2b(s["mac"]):
        emitted_cmac.append((s, got))

# ---------------------------------------------------------------- GTP-U reference
# Independent second encoder: minimal G-PDU header per TS 29.281 (version 1,
# PT=1, no optional fields -> flags 0x30, type 0xff).
def gtpu_ref(teid: int, payload: bytes) -> bytes:
    return struct.pack(">BBHI", 0x30, 0xFF, len(payload), teid) + payload


GTPU_CASES = [
    (0x00000000, b""),
    (0x00000007, b"abc"),
    (0xDEADBEEF, bytes(range(32))),
]

# ---------------------------------------------------------------- statistics fixtures
import math
import random


def ci99(samples):
    n = len(samples)
    mean = math.fsum(samples) / n
    if n < 2:
        return mean, mean, mean
    var = math.fsum((x - mean) ** 2 for x in samples) / (n - 1)
    hw = 2.5758 * math.sqrt(var) / math.sqrt(n)
    return mean, mean - hw, mean + hw


seq100 = list(range(1, 101))
m, lo, hi = ci99(seq100)
print(f"CI fixture 1..100: mean={m!r} lo={lo!r} hi={hi!r}")

rng = random.Random(20260809)
ci_fixtures = []
for i in range(4):
    n = rng.randint(5, 40)
    xs = [rng.uniform(-50, 150) for _ in range(n)]
    ci_fixtures.append((xs, ci99(xs)))

pct_sorted = sorted(rng.uniform(0, 1000) for _ in range(37))


def pct_nearest_rank(sorted_xs, q):
    n = len(sorted_xs)
    rank = max(1, math.ceil(q / 100.0 * n))
    return sorted_xs[rank - 1]


# linear fit fixture: y = 3.5x - 2 with fixed noise, least squares by closed form
fit_xs = [float(x) for x in range(1, 13)]
fit_rng = random.Random(7)
fit_ys = [3.5 * x - 2.0 + fit_rng.uniform(-0.25, 0.25) for x in fit_xs]
n = len(fit_xs)
sx = math.fsum(fit_xs); sy = math.fsum(fit_ys)
sxx = math.fsum(x * x for x in fit_xs); sxy = math.fsum(x * y for x, y in zip(fit_xs, fit_ys))
slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
intercept = (sy - slope * sx) / n
ss_res = math.fsum((y - (slope * x + intercept)) ** 2 for x, y in zip(fit_xs, fit_ys))
mean_y = sy / n
ss_tot = math.fsum((y - mean_y) ** 2 for y in fit_ys)
r2 = 1.0 - ss_res / ss_tot


# ---------------------------------------------------------------- emit header
def cxx_bytes(b: bytes) -> str:
    return '"' + b.hex() + '"'


def emit(path):
    w = open(path, "w")
    w.write("// Frozen expected values, generated by tests/oracles/gen_vectors.py.\n")
    w.write("// Do not edit by hand; rerun the generator instead.\n")
    w.write("#pragma once\n\n#include <cstdint>\n\n")
    w.write("namespace vectors {\n\n")
    w.write("struct UuVector {\n  const char* key_hex;\n  uint32_t count;\n"
            "  uint8_t bearer;\n  uint8_t direction;\n  const char* in_hex;\n"
            "  const char* out_hex;\n  unsigned bit_len; // 0 = byte aligned\n};\n\n")

    w.write("inline constexpr UuVector kNea2Published[] = {\n")
    for s, got in emitted_eea2:
        w.write(f'    {{"{s["key"].replace(" ", "")}", 0x{s["count"]:08x}u, '
                f'{s["bearer"]}, {s["direction"]}, {cxx_bytes(h2b(s["pt"]))}, '
                f'{cxx_bytes(got)}, {s["bits"]}}},\n')
    w.write("};\n\n")

    w.write("inline constexpr UuVector kNia2Published[] = {\n")
    for s, got in emitted_eia2:
        w.write(f'    {{"{s["key"]}", 0x{s["count"]:08x}u, {s["bearer"]}, '
                f'{s["direction"]}, {cxx_bytes(h2b(s["msg"]))}, {cxx_bytes(got)}, 0}},\n')
    w.write("};\n\n")

    w.write("inline constexpr UuVector kNia2Oracle[] = {\n")
    for s in SUPP:
        w.write(f'    {{"{s["key"].hex()}", 0x{s["count"]:08x}u, {s["bearer"]}, '
                f'{s["direction"]}, {cxx_bytes(s["msg"])}, {cxx_bytes(s["mac"])}, 0}},\n')
    w.write("};\n\n")

    w.write("inline constexpr UuVector kNea2Oracle[] = {\n")
    for s in SUPP:
        w.write(f'    {{"{s["key"].hex()}", 0x{s["count"]:08x}u, {s["bearer"]}, '
                f'{s["direction"]}, {cxx_bytes(s["msg"])}, {cxx_bytes(s["ks"])}, 0}},\n')
    w.write("};\n\n")

    w.write("struct AeadVector {\n  const char* key_hex;\n  const char* iv_hex;\n"
            "  const char* aad_hex;\n  const char* pt_hex;\n  const char* ct_hex;\n"
            "  const char* tag_hex;\n};\n\n")
    w.write("inline constexpr AeadVector kGcmPublished[] = {\n")
    for s, ct, tag in emitted_gcm:
        w.write(f'    {{"{s["key"]}", "{s["iv"]}", "{s["aad"]}", '
                f'{cxx_bytes(h2b(s["pt"]))}, {cxx_bytes(ct)}, {cxx_bytes(tag)}}},\n')
    w.write("};\n\n")

    w.write("struct MacVector {\n  const char* key_hex;\n  const char* msg_hex;\n"
            "  const char* mac_hex;\n};\n\n")
    w.write("inline constexpr MacVector kHmacSha256Published[] = {\n")
    for s, got in emitted_hmac:
        w.write(f'    {{"{s["key"]}", {cxx_bytes(s["data"])}, {cxx_bytes(got)}}},\n')
    w.write("};\n\n")
    w.write("inline constexpr MacVector kAesCmacPublished[] = {\n")
    for s, got in emitted_cmac:
        w.write(f'    {{"{CMAC_KEY.hex()}", "{s["msg"]}", {cxx_bytes(got)}}},\n')
    w.write("};\n\n")

    w.write("struct GtpuVector {\n  uint32_t teid;\n  const char* payload_hex;\n"
            "  const char* wire_hex;\n};\n\n")
    w.write("inline constexpr GtpuVector kGtpuReference[] = {\n")
    for teid, payload in GTPU_CASES:
        w.write(f'    {{0x{teid:08x}u, {cxx_bytes(payload)}, '
                f'{cxx_bytes(gtpu_ref(teid, payload))}}},\n')
    w.write("};\n\n")

    w.write("struct CiFixture {\n  const double* samples;\n  unsigned n;\n"
            "  double mean;\n  double lo;\n  double hi;\n};\n\n")
    for i, (xs, _) in enumerate(ci_fixtures):
        w.write(f"inline constexpr double kCiSamples{i}[] = {{"
                + ", ".join(repr(x) for x in xs) + "};\n")
    w.write("\ninline constexpr CiFixture kCiFixtures[] = {\n")
    for i, (xs, (mm, ll, hh)) in enumerate(ci_fixtures):
        w.write(f"    {{kCiSamples{i}, {len(xs)}, {mm!r}, {ll!r}, {hh!r}}},\n")
    w.write("};\n\n")
    w.write(f"inline constexpr double kCi100Mean = {m!r};\n")
    w.write(f"inline constexpr double kCi100Lo = {lo!r};\n")
    w.write(f"inline constexpr double kCi100Hi = {hi!r};\n\n")

    w.write("inline constexpr double kPercentileSamples[] = {"
            + ", ".join(repr(x) for x in pct_sorted) + "};\n")
    w.write("struct PercentileCase { double q; double value; };\n")
    w.write("inline constexpr PercentileCase kPercentileCases[] = {\n")
    for q in (0.0, 1.0, 25.0, 50.0, 75.0, 99.0, 100.0):
        w.write(f"    {{{q!r}, {pct_nearest_rank(pct_sorted, q)!r}}},\n")
    w.write("};\n\n")

    w.write("inline constexpr double kFitXs[] = {"
            + ", ".join(repr(x) for x in fit_xs) + "};\n")
    w.write("inline constexpr double kFitYs[] = {"
            + ", ".join(repr(y) for y in fit_ys) + "};\n")
    w.write(f"inline constexpr double kFitSlope = {slope!r};\n")
    w.write(f"inline constexpr double kFitIntercept = {intercept!r};\n")
    w.write(f"inline constexpr double kFitR2 = {r2!r};\n")
    w.write("\n}  // namespace vectors\n")
    w.close()
    print(f"wrote {path}")


if failures:
    print(f"\n{len(failures)} vector(s) FAILED oracle verification; not emitting.")
    sys.exit(1)

emit(sys.argv[1] if len(sys.argv) > 1 else "tests/vectors.hpp")
print("all vectors verified")
