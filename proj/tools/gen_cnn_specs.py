#!/usr/bin/env python3
"""Generate per-layer output element counts for the shipped CNN model specs.

Every Conv2d and Linear output tensor needs one StoB conversion per element.
Counts come from a batch-1 forward pass through the torchvision architecture
definitions (random init, no weights downloaded). Each count is also checked
against closed-form conv/linear shape arithmetic on the recorded input shape.

    python3 tools/gen_cnn_specs.py --out data/models          # regenerate
    python3 tools/gen_cnn_specs.py --verify data/models       # re-derive and compare
"""

import argparse
import json
import math
import pathlib
import sys

import torch
import torchvision

MODELS = {
    # file stem: (display name, constructor, input side)
    "shufflenet_v2": ("ShuffleNet_V2", lambda: torchvision.models.shufflenet_v2_x1_0(weights=None), 224),
    "mobilenet_v2": ("MobileNet_V2", lambda: torchvision.models.mobilenet_v2(weights=None), 224),
    "densenet121": ("DenseNet121", lambda: torchvision.models.densenet121(weights=None), 224),
    "inception_v3": (
        "Inception_V3",
        lambda: torchvision.models.inception_v3(weights=None, aux_logits=False, init_weights=False),
        299,
    ),
}


def analytic_elements(module, in_shape):
    if isinstance(module, torch.nn.Linear):
        return math.prod(in_shape[:-1]) * module.out_features
    n, _, h, w = in_shape
    out = []
    for i, size in enumerate((h, w)):
        k, s, p, d = (module.kernel_size[i], module.stride[i], module.padding[i], module.dilation[i])
        out.append((size + 2 * p - d * (k - 1) - 1) // s + 1)
    return n * module.out_channels * out[0] * out[1]


def layer_counts(ctor, side):
    torch.manual_seed(0)
    model = ctor().eval()
    layers = []
    hooks = []
    for name, mod in model.named_modules():
        if isinstance(mod, (torch.nn.Conv2d, torch.nn.Linear)):
            def hook(m, inp, out, name=name):
                got = out.numel()
                want = analytic_elements(m, tuple(inp[0].shape))
                if got != want:
                    raise RuntimeError(f"{name}: forward gives {got}, shape arithmetic gives {want}")
                layers.append({"name": name, "output_elements": int(got)})
            hooks.append(mod.register_forward_hook(hook))
    with torch.no_grad():
        model(torch.zeros(1, 3, side, side))
    for h in hooks:
        h.remove()
    return layers


def spec(stem):
    display, ctor, side = MODELS[stem]
    return {
        "name": display,
        "provenance": {
            "generator": "tools/gen_cnn_specs.py",
            "source": f"torchvision {torchvision.__version__} architecture definition, random init",
            "input_shape": [1, 3, side, side],
            "counted_layers": "Conv2d and Linear outputs, forward order",
        },
        "layers": layer_counts(ctor, side),
    }


def main():
    ap = argparse.ArgumentParser()
    g = ap.add_mutually_exclusive_group(required=True)
    g.add_argument("--out", type=pathlib.Path)
    g.add_argument("--verify", type=pathlib.Path)
    args = ap.parse_args()

    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        for stem in MODELS:
            s = spec(stem)
            (args.out / f"{stem}.json").write_text(json.dumps(s, indent=1) + "\n")
            total = sum(l["output_elements"] for l in s["layers"])
            print(f"{stem}: {len(s['layers'])} layers, {total} elements")
        return 0

    bad = 0
    for stem in MODELS:
        shipped = json.loads((args.verify / f"{stem}.json").read_text())
        fresh = spec(stem)
        if shipped["layers"] != fresh["layers"]:
            print(f"MISMATCH {stem}")
            bad += 1
        else:
            print(f"ok {stem}: {len(fresh['layers'])} layers")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
