"""PyTorch reference generator and an MGSR1 writer that shares no code with the C++ side."""

import struct

import torch
from torch import nn

FEATURES = 64


def conv(cin, cout, k):
    return nn.Conv2d(cin, cout, k, padding=k // 2, padding_mode="replicate")


class ResidualBlock(nn.Module):
    def __init__(self):
        super().__init__()
        self.conv1 = conv(FEATURES, FEATURES, 3)
        self.bn1 = nn.BatchNorm2d(FEATURES)
        self.prelu = nn.PReLU(FEATURES)
        self.conv2 = conv(FEATURES, FEATURES, 3)
        self.bn2 = nn.BatchNorm2d(FEATURES)

    def forward(self, x):
        return x + self.bn2(self.conv2(self.prelu(self.bn1(self.conv1(x)))))


class Generator(nn.Module):
    def __init__(self, blocks):
        super().__init__()
        self.head_conv = conv(3, FEATURES, 9)
        self.head_prelu = nn.PReLU(FEATURES)
        self.blocks = nn.ModuleList(ResidualBlock() for _ in range(blocks))
        self.post_conv = conv(FEATURES, FEATURES, 3)
        self.post_bn = nn.BatchNorm2d(FEATURES)
        self.up_conv = conv(FEATURES, 4 * FEATURES, 3)
        self.shuffle = nn.PixelShuffle(2)
        self.up_prelu = nn.PReLU()  # single shared slope
        self.tail_conv = conv(FEATURES, 3, 9)

    def forward(self, x):
        head = self.head_prelu(self.head_conv(x))
        y = head
        for b in self.blocks:
            y = b(y)
        y = self.post_bn(self.post_conv(y)) + head
        y = self.up_prelu(self.shuffle(self.up_conv(y)))
        return torch.tanh(self.tail_conv(y))


def randomize(model, seed):
    """Non-trivial BN statistics and PReLU slopes so every layer matters."""
    g = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for m in model.modules():
            if isinstance(m, nn.BatchNorm2d):
                m.weight.copy_(1 + 0.2 * torch.randn(m.weight.shape, generator=g))
                m.bias.copy_(0.1 * torch.randn(m.bias.shape, generator=g))
                m.running_mean.copy_(0.1 * torch.randn(m.running_mean.shape, generator=g))
                m.running_var.copy_(0.5 + torch.rand(m.running_var.shape, generator=g))
            elif isinstance(m, nn.PReLU):
                m.weight.copy_(0.05 + 0.4 * torch.rand(m.weight.shape, generator=g))
    return model.eval()


def named_tensors(model):
    out = []

    def add(name, t):
        out.append((name, t.detach().to(torch.float32).contiguous()))

    def add_conv(name, c):
        add(f"{name}.weight", c.weight)
        add(f"{name}.bias", c.bias)

    def add_bn(name, bn):
        add(f"{name}.gamma", bn.weight)
        add(f"{name}.beta", bn.bias)
        add(f"{name}.mean", bn.running_mean)
        add(f"{name}.var", bn.running_var)

    add_conv("head.conv", model.head_conv)
    add("head.prelu.alpha", model.head_prelu.weight)
    for i, b in enumerate(model.blocks):
        add_conv(f"res{i}.conv1", b.conv1)
        add_bn(f"res{i}.bn1", b.bn1)
        add("res{}.prelu.alpha".format(i), b.prelu.weight)
        add_conv(f"res{i}.conv2", b.conv2)
        add_bn(f"res{i}.bn2", b.bn2)
    add_conv("post.conv", model.post_conv)
    add_bn("post.bn", model.post_bn)
    add_conv("up.conv", model.up_conv)
    add("up.prelu.alpha", model.up_prelu.weight)
    add_conv("tail.conv", model.tail_conv)
    return out


def write_mgsr1(path, model):
    tensors = named_tensors(model)
    with open(path, "wb") as fh:
        fh.write(b"MGSR")
        fh.write(struct.pack("<IIII", 1, 2, len(model.blocks), len(tensors)))
        for name, t in tensors:
            raw = name.encode()
            fh.write(struct.pack("<I", len(raw)) + raw)
            fh.write(struct.pack("<BB", 0, t.dim()))
            fh.write(struct.pack(f"<{t.dim()}I", *t.shape))
            fh.write(t.numpy().astype("<f4").tobytes())
    return [name for name, _ in tensors]


def read_mgsr1(path):
    """Returns (upscale, blocks, {name: (dims, flat float list)})."""
    with open(path, "rb") as fh:
        data = fh.read()
    assert data[:4] == b"MGSR"
    version, upscale, blocks, count = struct.unpack_from("<IIII", data, 4)
    assert version == 1
    pos = 20
    tensors = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<I", data, pos)
        pos += 4
        name = data[pos : pos + name_len].decode()
        pos += name_len
        dtype, ndim = struct.unpack_from("<BB", data, pos)
        pos += 2
        assert dtype == 0
        dims = struct.unpack_from(f"<{ndim}I", data, pos)
        pos += 4 * ndim
        size = 1
        for d in dims:
            size *= d
        tensors[name] = (tuple(dims), struct.unpack_from(f"<{size}f", data, pos))
        pos += 4 * size
    assert pos == len(data)
    return upscale, blocks, tensors
