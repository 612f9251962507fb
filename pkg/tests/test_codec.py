import json

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from dualmark import codec, detect, dsp
from dualmark.audio import AudioBuffer
from dualmark.codec import Domain
from dualmark.errors import DegenerateFrame, InvalidInput, InvalidKey
from dualmark.metrics import snr

from .conftest import ALPHA, WM_DCT, WM_DWT

ascii_text = st.text(alphabet=st.characters(min_codepoint=0, max_codepoint=127), min_size=1, max_size=64)


# -- payloads ---------------------------------------------------------------

def test_known_char_bits():
    assert "".join(map(str, codec.text_to_bits("U").bits)) == "1010101"


def test_paper_payload_sizes():
    assert len(WM_DCT) == 24 and len(codec.text_to_bits(WM_DCT)) == 168
    assert len(WM_DWT) == 41 and len(codec.text_to_bits(WM_DWT)) == 287
    assert codec.bits_to_text(codec.text_to_bits(WM_DWT).bits) == WM_DWT


@pytest.mark.parametrize("bad", ["é", "", "ok—no"])
def test_text_to_bits_rejects(bad):
    with pytest.raises(InvalidInput):
        codec.text_to_bits(bad)


def test_bits_to_text_rejects_partial_char():
    with pytest.raises(InvalidInput):
        codec.bits_to_text([1, 0, 1, 0, 1, 0])


@given(ascii_text)
def test_text_round_trip(text):
    p = codec.text_to_bits(text)
    assert p.bits.size == 7 * len(text)
    assert codec.bits_to_text(p.bits) == text


# -- matrix layouts ---------------------------------------------------------

def test_dct_matrix_layout_16():
    m = codec.build_dct_matrix(np.arange(16.0))
    np.testing.assert_array_equal(m, [[0, 1, 2], [7, 8, 9], [13, 14, 15]])


def test_dct_matrix_layout_9():
    m = codec.build_dct_matrix(np.arange(9.0))
    np.testing.assert_array_equal(m, np.arange(9.0).reshape(3, 3))


def test_dct_matrix_too_short():
    with pytest.raises(InvalidInput):
        codec.build_dct_matrix(np.arange(8.0))
    with pytest.raises(InvalidInput):
        codec.scatter_dct_matrix(np.zeros((3, 3)), np.arange(8.0))


def test_dct_scatter(rng):
    c = rng.standard_normal(64)
    np.testing.assert_array_equal(codec.scatter_dct_matrix(codec.build_dct_matrix(c), c), c)
    m = codec.build_dct_matrix(c)
    m[1, 2] += 1.0
    changed = np.flatnonzero(codec.scatter_dct_matrix(m, c) != c)
    np.testing.assert_array_equal(changed, [33])


def test_dwt_matrix_layout():
    p = dsp.DwtPyramid(
        d1=np.concatenate([[1, 2, 3, 4], np.zeros(28)]),
        d2=np.concatenate([[5, 6, 7, 8], np.zeros(12)]),
        d3=np.concatenate([[9, 10, 11, 12], np.zeros(4)]),
        d4=np.array([13.0, 14, 15, 16]),
        a4=np.zeros(4),
    )
    np.testing.assert_array_equal(codec.build_dwt_matrix(p), np.arange(1, 17).reshape(4, 4))


def test_dwt_matrix_zero_and_scatter(rng):
    assert not codec.build_dwt_matrix(dsp.dwt4_forward(np.zeros(64))).any()
    p = dsp.dwt4_forward(rng.standard_normal(128))
    q = codec.scatter_dwt_matrix(codec.build_dwt_matrix(p), p)
    for a, b in zip((p.d1, p.d2, p.d3, p.d4, p.a4), (q.d1, q.d2, q.d3, q.d4, q.a4)):
        np.testing.assert_array_equal(a, b)


def test_dwt_matrix_short_band():
    p = dsp.DwtPyramid(np.zeros(8), np.zeros(4), np.zeros(2), np.zeros(1), np.zeros(1))
    with pytest.raises(InvalidInput):
        codec.build_dwt_matrix(p)


def test_packed_indices_agree_with_pyramid(rng):
    x = rng.standard_normal(256)
    packed = dsp.dwt4_packed(x)[0]
    np.testing.assert_array_equal(packed[codec.dwt_matrix_indices(256)],
                                  codec.build_dwt_matrix(dsp.dwt4_forward(x)))


# -- embedding --------------------------------------------------------------

@pytest.mark.parametrize("domain", list(Domain))
def test_zero_payload_is_identity(rng, domain):
    x = rng.uniform(-0.5, 0.5, 64 * 20)
    out, key = codec.embed_domain(x, np.zeros(20, dtype=np.uint8), ALPHA, domain)
    assert np.max(np.abs(out - x)) <= 1e-9
    assert key.s11_originals.size == 20 and np.all(key.s11_originals > 0)


@pytest.mark.parametrize("domain", list(Domain))
def test_one_bit_scales_s11(rng, domain):
    x = rng.uniform(-0.5, 0.5, 96 * 10)
    bits = np.array([1, 0, 1, 1, 0, 0, 1, 0, 1, 1], dtype=np.uint8)
    out, key = codec.embed_domain(x, bits, ALPHA, domain)
    s = codec.frame_s11(out, domain, key.n_frames, key.frame_length)
    np.testing.assert_allclose(s / key.s11_originals, 1 + ALPHA * bits, rtol=0, atol=1e-9)


def test_embed_rejects_bad_alpha(rng):
    for a in (0.0, 1.0, -0.1):
        with pytest.raises(InvalidInput):
            codec.embed_domain(rng.standard_normal(640), [1, 0], a, Domain.DCT_SVD)


@pytest.mark.parametrize("domain", list(Domain))
def test_degenerate_frame(domain):
    x = np.zeros(64 * 4)
    x[:64] = np.linspace(-1, 1, 64)
    with pytest.raises(DegenerateFrame) as exc:
        codec.embed_domain(x, [1, 0, 1, 1], ALPHA, domain)
    assert exc.value.frames == [1, 2, 3]


def test_short_input_is_padded():
    x = np.random.default_rng(0).standard_normal(50)
    out, key = codec.embed_domain(x, [1], ALPHA, Domain.DCT_SVD)
    assert out.size == 64 and key.frame_length == 64


def test_long_input_keeps_length(rng):
    x = rng.standard_normal(64 * 10 + 37)
    out, key = codec.embed_domain(x, np.ones(10, dtype=np.uint8), ALPHA, Domain.DWT_SVD)
    assert out.size == x.size and key.frame_length == 64
    np.testing.assert_array_equal(out[key.span:], x[key.span:])


def test_paper_configuration(paper_embed, speech):
    wm, kf = paper_embed
    assert kf.dwt_key.n_frames == 7 + 287 and kf.dct_key.n_frames == 7 + 168
    assert kf.payload_lengths == {Domain.DWT_SVD: 287, Domain.DCT_SVD: 168}
    assert kf.known_char_frames == 7
    assert len(wm) == kf.padded_length == speech.samples.size
    assert snr(speech.samples, wm.samples) >= 20.0


def test_multilevel_empty_text(speech):
    with pytest.raises(InvalidInput):
        codec.embed_multilevel(speech, "", WM_DCT, ALPHA)


def test_host_too_short():
    host = AudioBuffer(np.random.default_rng(1).standard_normal(5000), 8000)
    with pytest.raises(InvalidInput, match="18816"):
        codec.embed_multilevel(host, WM_DWT, WM_DCT, ALPHA)


def test_key_consistency(speech):
    kbits = codec.known_bits()
    dwt_bits = np.concatenate([kbits, codec.text_to_bits(WM_DWT).bits])
    dct_bits = np.concatenate([kbits, codec.text_to_bits(WM_DCT).bits])
    stage1, dwt_key = codec.embed_domain(speech.samples, dwt_bits, ALPHA, Domain.DWT_SVD)
    stage2, dct_key = codec.embed_domain(stage1, dct_bits, ALPHA, Domain.DCT_SVD)
    s_dwt = codec.frame_s11(stage1[:dwt_key.span], Domain.DWT_SVD, dwt_key.n_frames, dwt_key.frame_length)
    np.testing.assert_allclose(s_dwt, dwt_key.s11_originals * (1 + ALPHA * dwt_bits), rtol=1e-9)
    s_dct = codec.frame_s11(stage2[:dct_key.span], Domain.DCT_SVD, dct_key.n_frames, dct_key.frame_length)
    np.testing.assert_allclose(s_dct, dct_key.s11_originals * (1 + ALPHA * dct_bits), rtol=1e-9)

    # undoing the DCT layer gives back the DWT-level signal
    restored = stage2.copy()
    restored[:dct_key.span] = codec.invert_domain(stage2[:dct_key.span], dct_key, dct_bits)
    assert np.max(np.abs(restored - stage1)) <= 1e-9
    s_after = codec.frame_s11(restored[:dwt_key.span], Domain.DWT_SVD, dwt_key.n_frames, dwt_key.frame_length)
    np.testing.assert_allclose(s_after, dwt_key.s11_originals * (1 + ALPHA * dwt_bits), rtol=1e-9)


def test_invert_zero_payload_identity(rng):
    x = rng.uniform(-0.5, 0.5, 64 * 12)
    out, key = codec.embed_domain(x, np.zeros(12, dtype=np.uint8), ALPHA, Domain.DCT_SVD)
    back = codec.invert_domain(out, key, np.zeros(12))
    assert np.max(np.abs(back - x)) <= 1e-9


def test_invert_framing_mismatch(rng):
    out, key = codec.embed_domain(rng.standard_normal(640), np.ones(10, dtype=np.uint8), ALPHA, Domain.DCT_SVD)
    with pytest.raises(InvalidInput):
        codec.invert_domain(out[:-1], key, np.ones(10))
    with pytest.raises(InvalidInput):
        codec.invert_domain(out, key, np.ones(9))


def test_alpha_monotone_snr(speech):
    values = [snr(speech.samples, codec.embed_multilevel(speech, WM_DWT, WM_DCT, a)[0].samples)
              for a in (0.01, 0.03, 0.05, 0.1, 0.2)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_deterministic(speech):
    a, ka = codec.embed_multilevel(speech, WM_DWT, WM_DCT, ALPHA)
    b, kb = codec.embed_multilevel(speech, WM_DWT, WM_DCT, ALPHA)
    assert np.array_equal(a.samples, b.samples)
    assert ka.to_json() == kb.to_json()


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(wm_dwt=ascii_text, wm_dct=ascii_text, alpha=st.sampled_from([0.01, 0.05, 0.1]),
       seed=st.integers(0, 2**32 - 1), extra=st.integers(0, 3000))
def test_round_trip_property(wm_dwt, wm_dct, alpha, seed, extra):
    n = max(7 * (len(wm_dwt) + 1), 7 * (len(wm_dct) + 1)) * 64 + extra
    host = AudioBuffer(np.random.default_rng(seed).uniform(-1, 1, n), 8000)
    wm, kf = codec.embed_multilevel(host, wm_dwt, wm_dct, alpha)
    res = detect.extract(wm, kf, detect.Detector.ADAPTIVE)
    assert res[Domain.DWT_SVD].text == wm_dwt
    assert res[Domain.DCT_SVD].text == wm_dct


# -- key file ---------------------------------------------------------------

def test_keyfile_json_schema(paper_embed):
    _, kf = paper_embed
    doc = json.loads(kf.to_json())
    assert set(doc) == {"format_version", "alpha", "sample_rate", "padded_length", "known_char",
                        "dwt_svd", "dct_svd"}
    assert doc["format_version"] == 1 and doc["known_char"] == "U"
    for dom in ("dwt_svd", "dct_svd"):
        assert set(doc[dom]) == {"n_frames", "frame_length", "payload_bits", "s11_originals"}


def test_keyfile_round_trip_bit_exact(paper_embed, tmp_path):
    _, kf = paper_embed
    path = tmp_path / "key.json"
    kf.save(path)
    back = codec.KeyFile.load(path)
    for a, b in zip(kf.keys(), back.keys()):
        assert np.array_equal(a.s11_originals, b.s11_originals)
        assert (a.n_frames, a.frame_length, a.payload_bits) == (b.n_frames, b.frame_length, b.payload_bits)
    assert back.padded_length == kf.padded_length and back.sample_rate == kf.sample_rate


def test_keyfile_uses_17_significant_digits():
    key = codec.DomainKey(Domain.DCT_SVD, [0.1, 1 / 3, 2.0 ** 0.5, 1e-5, 1.0, 2.0, 3.0, 4.0], 0.05, 8, 64, 1)
    kf = codec.KeyFile(alpha=0.05, sample_rate=8000, padded_length=512, dct_key=key)
    text = kf.to_json()
    assert "0.10000000000000001" in text and "0.33333333333333331" in text
    assert np.array_equal(codec.KeyFile.from_json(text).dct_key.s11_originals, key.s11_originals)


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("alpha"),
    lambda d: d.update(format_version=2),
    lambda d: d["dct_svd"].update(n_frames=3),
    lambda d: d["dct_svd"].update(payload_bits=5),
    lambda d: d.pop("dct_svd") and d.pop("dwt_svd"),
])
def test_keyfile_rejects(paper_embed, mutate):
    doc = json.loads(paper_embed[1].to_json())
    mutate(doc)
    with pytest.raises(InvalidKey):
        codec.KeyFile.from_json(json.dumps(doc))
