#include "avlc/adapt.hpp"

#include <numeric>

#include "avlc/errors.hpp"

namespace avlc {

void AdaptPolicy::validate() const {
    if (!(ber_tgt > 0.0 && ber_tgt < 0.5)) throw validation_error("policy.ber_tgt", "must lie in (0, 0.5)");
    if (!(margin_db >= 0.0)) throw validation_error("policy.margin_db", "must be >= 0");
}

double predicted_ber(const Mode& mode, const StreamSnrs& snrs) {
    if (mode.scheme != snrs.scheme) throw scheme_error("predicted_ber: SNRs were computed for the other scheme");
    if (snrs.snr.empty()) throw length_error("predicted_ber: no stream SNRs");
    double sum = 0.0;
    for (double s : snrs.snr) sum += ber_theoretical(mode.order, s);
    return sum / static_cast<double>(snrs.snr.size());
}

namespace {

StreamSnrs derate(StreamSnrs s, double margin_db) {
    const double f = db_to_linear(-margin_db);
    for (double& v : s.snr) v *= f;
    return s;
}

}  // namespace

Selection select_mode_detail(const std::optional<StreamSnrs>& sm, const StreamSnrs& sd, const AdaptPolicy& policy) {
    const StreamSnrs sd_d = derate(sd, policy.margin_db);
    const std::optional<StreamSnrs> sm_d = sm ? std::optional(derate(*sm, policy.margin_db)) : std::nullopt;

    std::optional<Selection> best;
    for (const Mode& m : all_modes) {
        if (m.scheme == Scheme::sm && !sm_d) continue;
        const double ber = predicted_ber(m, m.scheme == Scheme::sm ? *sm_d : sd_d);
        if (!(ber <= policy.ber_tgt)) continue;
        if (!best) {
            best = Selection{m, ber, false};
            continue;
        }
        const double eta = m.efficiency();
        const double best_eta = best->mode.efficiency();
        bool better = eta > best_eta;
        if (eta == best_eta) {
            if (ber < best->predicted_ber)
                better = true;
            else if (ber == best->predicted_ber && m.scheme == Scheme::sd && best->mode.scheme == Scheme::sm)
                better = true;
        }
        if (better) best = Selection{m, ber, false};
    }
    if (best) return *best;

    Selection fb{policy.fallback, 0.5, true};
    if (policy.fallback.scheme == Scheme::sd)
        fb.predicted_ber = predicted_ber(policy.fallback, sd_d);
    else if (sm_d)
        fb.predicted_ber = predicted_ber(policy.fallback, *sm_d);
    return fb;
}

Mode select_mode(const std::optional<StreamSnrs>& sm, const StreamSnrs& sd, const AdaptPolicy& policy) {
    return select_mode_detail(sm, sd, policy).mode;
}

std::uint8_t encode_mode(const Mode& m) {
    const std::uint8_t base = m.scheme == Scheme::sm ? 4 : 0;
    switch (m.order) {
        case QamOrder::qam4: return base;
        case QamOrder::qam16: return base + 1;
        case QamOrder::qam64: return base + 2;
        case QamOrder::qam256: return base + 3;
    }
    throw bad_code("encode_mode: illegal mode");
}

Mode decode_mode(unsigned code) {
    if (code > 7) throw bad_code("decode_mode: code " + std::to_string(code) + " outside [0, 7]");
    return all_modes[code];
}

ControllerState make_controller(const AdaptPolicy& policy) {
    ControllerState s;
    s.current = policy.initial;
    return s;
}

namespace {

Mode advance(ControllerState& state) {
    if (state.pending) {
        state.current = *state.pending;
        state.pending.reset();
    }
    ++state.frame;
    return state.current;
}

}  // namespace

Mode controller_step(ControllerState& state, const ChannelEstimate& est, const AdaptPolicy& policy,
                     const LinkBudget& budget) {
    const Mode applied = advance(state);
    std::optional<StreamSnrs> sm;
    try {
        sm = stream_snrs(est, budget.p_total, budget.n0, Scheme::sm);
    } catch (const singular_matrix&) {
        sm.reset();
    }
    const StreamSnrs sd = stream_snrs(est, budget.p_total, budget.n0, Scheme::sd);
    const Selection sel = select_mode_detail(sm, sd, policy);
    state.pending = sel.mode;
    state.history.push_back({state.frame, applied, sel.mode, sel.predicted_ber});
    return applied;
}

Mode controller_step_lost(ControllerState& state, const AdaptPolicy& policy) {
    const Mode applied = advance(state);
    state.pending = policy.fallback;
    state.history.push_back({state.frame, applied, policy.fallback, 0.5});
    return applied;
}

}  // namespace avlc
