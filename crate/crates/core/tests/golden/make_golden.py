#!/usr/bin/env python3
"""Regenerates the golden wire-format files from a standalone implementation.

Nothing here shares code with the Rust crate; the Rust tests compare their
output byte for byte against these files.

    python3 make_golden.py   # writes into this directory
"""

import os
import zlib

HERE = os.path.dirname(os.path.abspath(__file__))


def pack(bits):
    out = bytearray()
    for i in range(0, len(bits), 8):
        chunk = bits[i:i + 8] + [0] * (8 - len(bits[i:i + 8]))
        out.append(int("".join(map(str, chunk)), 2))
    return bytes(out)


def unpack(data):
    return [int(b) for byte in data for b in format(byte, "08b")]


def uint(value, width):
    return [int(b) for b in format(value, "0%db" % width)]


def frame(data_bits):
    crc = zlib.crc32(pack(data_bits)) & 0xFFFFFFFF
    return uint(0x5257, 16) + uint(1, 8) + uint(len(data_bits), 32) + uint(crc, 32) + data_bits


def rle(bits):
    def raw():
        return [1] + bits

    if bits and bits[0] == 1:
        return raw()
    runs, i = [], 0
    while i < len(bits):
        j = i
        while j < len(bits) and bits[j] == bits[i]:
            j += 1
        runs.append(j - i)
        i = j
    body = []
    for r in runs:
        while r > 255:
            body.append(0)
            r -= 255
        body.append(r)
    if 8 * len(body) > len(bits):
        return raw()
    return [0] + [b for byte in body for b in uint(byte, 8)]


def prng_bits(seed, count):
    mask = (1 << 64) - 1
    s, out = seed, []
    while len(out) < count:
        s ^= s >> 12
        s ^= (s << 25) & mask
        s ^= s >> 27
        word = (s * 2685821657736338717) & mask
        out.extend(uint(word, 64)[: count - len(out)])
    return out


def pgm(width, height, pixels):
    return b"P5\n%d %d\n255\n" % (width, height) + bytes(pixels)


# --- RRL -------------------------------------------------------------------

def rrl_embed(width, height, pixels, payload_bits):
    px = list(pixels)
    data = pack(payload_bits)
    cols = width // 8
    record = bytearray(b"\xd1\xf1\x08") + len(data).to_bytes(4, "big")
    for block, byte in enumerate(data):
        top, left = (block // cols) * 8, (block % cols) * 8
        rows = []
        for k in range(8):
            v = 0
            for j in range(8):
                v = (v << 1) | (px[(top + k) * width + left + j] & 1)
            rows.append(v)
        record += block.to_bytes(4, "big") + bytes([rows[7]])
        rows = [byte] + rows[:7]
        for k in range(8):
            for j in range(8):
                idx = (top + k) * width + left + j
                px[idx] = (px[idx] & 0xFE) | ((rows[k] >> (7 - j)) & 1)
    return px, bytes(record)


# --- DE --------------------------------------------------------------------

def bound(alpha):
    return min(2 * (255 - alpha), 2 * alpha + 1)


def de_embed(width, height, pixels, payload):
    carriers, expandable = [], []
    for r in range(height):
        for c in range(0, width - width % 2, 2):
            idx = r * width + c
            x, y = pixels[idx], pixels[idx + 1]
            a, d = (x + y) // 2, x - y
            b = bound(a)
            if all(abs(2 * (d // 2) + i) <= b for i in (0, 1)):
                if all(abs(2 * d + i) <= b for i in (0, 1)):
                    expandable.append(len(carriers))
                carriers.append((idx, a, d))
    nc = len(carriers)

    def mapping(k):
        m = [0] * nc
        for slot in expandable[:k]:
            m[slot] = 1
        return m

    def segment(m):
        inv = m[0] if m else 0
        return [inv] + rle([b ^ inv for b in m])

    k = 64 + len(payload)
    for _ in range(16):
        assert k <= len(expandable), "capacity"
        need = 64 + len(segment(mapping(k))) + len(payload)
        if k >= need:
            break
        k = need
    else:
        raise AssertionError("no fixed point")
    m = mapping(k)
    seg = segment(m)
    stream = uint(0xD1F0, 16) + uint(len(seg), 24) + uint(len(payload), 24) + seg
    stream += [d % 2 for (_, _, d), bit in zip(carriers, m) if not bit]
    stream += payload
    stream += [0] * (nc - len(stream))
    px = list(pixels)
    for (idx, a, d), expanded, bit in zip(carriers, m, stream):
        dw = 2 * d + bit if expanded else 2 * (d // 2) + bit
        px[idx] = a + (dw + 1) // 2
        px[idx + 1] = a - dw // 2
        assert 0 <= px[idx] <= 255 and 0 <= px[idx + 1] <= 255
    return px


def rrl_host():
    return [(r * 7 + c * 13 + (r * c) % 5) & 0xFF for r in range(32) for c in range(32)]


def de_host():
    return [100 + (r * 3 + c * 2) // 4 + (r * c) % 3 for r in range(16) for c in range(32)]


def main():
    files = {}
    files["frame_123456789.bin"] = pack(frame(unpack(b"123456789")))
    files["frame_13bits.bin"] = pack(frame([1, 0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 0, 1]))
    files["rle_sparse.bin"] = pack(rle([0] * 300 + [1] * 40 + [0] * 700 + [1] * 5))
    files["rle_alternating.bin"] = pack(rle([i % 2 for i in range(20)]))
    files["prng_seed1_200.bin"] = pack(prng_bits(1, 200))

    marked, record = rrl_embed(32, 32, rrl_host(), frame(unpack(b"hello")))
    files["rrl_record.bin"] = record
    files["rrl_marked.pgm"] = pgm(32, 32, marked)

    files["de_marked.pgm"] = pgm(32, 16, de_embed(32, 16, de_host(), frame(unpack(b"hi"))))

    for name, data in files.items():
        with open(os.path.join(HERE, name), "wb") as f:
            f.write(data)
        print("%-22s %5d bytes" % (name, len(data)))


if __name__ == "__main__":
    main()
