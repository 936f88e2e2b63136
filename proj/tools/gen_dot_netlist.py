#!/usr/bin/env python3
"""Writes a gate-level signed dot-product netlist over NOT/NAND/NOR cells.

Each element product is formed by a truncated array multiplier at twice the
element width, sign-extended to the accumulator width and summed by ripple
carry adders. With --bug sext the product is first cut to the element width
and that truncated value is sign-extended instead.
"""

import argparse
import sys


class Netlist:
    def __init__(self):
        self.cells = []
        self.wires = 0

    def wire(self):
        self.wires += 1
        return "_%04d_" % (self.wires - 1)

    def cell(self, kind, pins):
        out = self.wire()
        conn = ", ".join(".%s(%s)" % (p, n) for p, n in pins + [("Y", out)])
        self.cells.append("  %s _c%04d_ (%s);" % (kind, len(self.cells), conn))
        return out

    def inv(self, a):
        return self.cell("NOT", [("A", a)])

    def nand(self, a, b):
        return self.cell("NAND", [("A", a), ("B", b)])

    def land(self, a, b):
        return self.inv(self.nand(a, b))

    def xor(self, a, b):
        n = self.nand(a, b)
        return self.nand(self.nand(a, n), self.nand(b, n))

    def add(self, xs, ys):
        """Ripple-carry sum of two equal-width bit lists, carry out dropped."""
        out, carry = [], None
        for k, (a, b) in enumerate(zip(xs, ys)):
            last = k + 1 == len(xs)
            x = self.xor(a, b)
            if carry is None:
                out.append(x)
                if not last:
                    carry = self.land(a, b)
            else:
                out.append(self.xor(x, carry))
                if not last:
                    carry = self.nand(self.nand(a, b), self.nand(carry, x))
        return out


def sext(bits, width):
    return bits + [bits[-1]] * (width - len(bits))


def multiply(nl, a, b, width):
    """Low `width` bits of a*b (both already extended to `width`)."""
    acc = [nl.land(a[j], b[0]) for j in range(width)]
    for i in range(1, width):
        row = [nl.land(a[j - i], b[i]) for j in range(i, width)]
        acc = acc[:i] + nl.add(acc[i:], row)
    return acc


def build(elements, width, acc_width, bug):
    nl = Netlist()
    terms = []
    for e in range(elements):
        a = ["arg_0[%d]" % (e * width + k) for k in range(width)]
        b = ["arg_1[%d]" % (e * width + k) for k in range(width)]
        pw = width if bug == "sext" else 2 * width
        p = multiply(nl, sext(a, pw), sext(b, pw), pw)
        terms.append(sext(p, acc_width))
    total = terms[0]
    for t in terms[1:]:
        total = nl.add(total, t)
    return nl, total


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--module", default="dot2_comb")
    ap.add_argument("--elements", type=int, default=2)
    ap.add_argument("--width", type=int, default=4)
    ap.add_argument("--acc", type=int, default=16)
    ap.add_argument("--bug", choices=["none", "sext"], default="none")
    ap.add_argument("-o", "--output", default="-")
    args = ap.parse_args()

    nl, total = build(args.elements, args.width, args.acc, args.bug)
    in_w = args.elements * args.width
    lines = [
        "// %d-element signed dot product, %d-bit elements, %d-bit result%s."
        % (args.elements, args.width, args.acc,
           " (products cut to %d bits, then sign-extended)" % args.width if args.bug == "sext" else ""),
        "// Generated by tools/gen_dot_netlist.py.",
        "module %s(arg_0, arg_1, out_0);" % args.module,
        "  input [%d:0] arg_0;" % (in_w - 1),
        "  input [%d:0] arg_1;" % (in_w - 1),
        "  output [%d:0] out_0;" % (args.acc - 1),
    ]
    lines += ["  wire _%04d_;" % i for i in range(nl.wires)]
    lines += nl.cells
    lines += ["  assign out_0[%d] = %s;" % (k, n) for k, n in enumerate(total)]
    lines.append("endmodule")
    text = "\n".join(lines) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as f:
            f.write(text)


if __name__ == "__main__":
    main()
