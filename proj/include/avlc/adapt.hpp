#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "avlc/mode.hpp"
#include "avlc/receiver.hpp"

namespace avlc {

struct AdaptPolicy {
    double ber_tgt = 1e-3;
    /// SNRs are de-rated by this many dB before prediction.
    double margin_db = 0.0;
    Mode fallback{Scheme::sd, QamOrder::qam4};
    Mode initial{Scheme::sm, QamOrder::qam64};

    void validate() const;
};

/// SD: ber_theoretical(M, snr). SM: mean over both streams.
/// Throws scheme_error when snrs.scheme differs from mode.scheme.
double predicted_ber(const Mode& mode, const StreamSnrs& snrs);

struct Selection {
    Mode mode;
    double predicted_ber = 0.5;
    bool fallback = false;
};

/// Highest-efficiency mode whose predicted BER meets policy.ber_tgt.
///
/// Equal efficiencies go to the lower predicted BER, then to SD. SM modes are
/// skipped when sm is empty (singular estimate). Returns policy.fallback when
/// nothing qualifies.
Selection select_mode_detail(const std::optional<StreamSnrs>& sm, const StreamSnrs& sd, const AdaptPolicy& policy);
Mode select_mode(const std::optional<StreamSnrs>& sm, const StreamSnrs& sd, const AdaptPolicy& policy);

/// 3-bit feedback code: 0..3 = SD-4..SD-256, 4..7 = SM-4..SM-256.
std::uint8_t encode_mode(const Mode& m);
/// Throws bad_code outside [0, 7].
Mode decode_mode(unsigned code);

/// Noise level and transmit power the controller predicts against.
struct LinkBudget {
    double p_total = 2.0;
    double n0 = 1.0;
};

struct HistoryEntry {
    int frame = 0;
    Mode applied;
    Mode selected;
    double predicted_ber = 0.5;
};

/// One controller per link. The selection made from frame n's estimate is fed
/// back and applied to frame n + 1.
struct ControllerState {
    Mode current;
    std::optional<Mode> pending;
    int frame = 0;
    std::vector<HistoryEntry> history;

    /// Mode the transmitter uses for the next frame.
    Mode next_mode() const { return pending.value_or(current); }
};

ControllerState make_controller(const AdaptPolicy& policy);

/// Applies the pending mode to this frame, selects from the new estimate and
/// stores the choice as pending. Returns the mode applied this frame.
Mode controller_step(ControllerState& state, const ChannelEstimate& est, const AdaptPolicy& policy,
                     const LinkBudget& budget);
/// Same, for a frame that carried no usable estimate; the fallback is fed back.
Mode controller_step_lost(ControllerState& state, const AdaptPolicy& policy);

}  // namespace avlc
