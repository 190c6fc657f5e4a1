#include "hilbench/simbench.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include <fcntl.h>
#include <poll.h>
#include <termios.h>
#include <unistd.h>

#include "hilbench/detail/digest.hpp"
#include "hilbench/detail/numfmt.hpp"

namespace hilbench {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::size_t model_channel_count(const StimulusModel& model) {
    return std::visit(overloaded{
                          [](const BlinkPhoto&) -> std::size_t { return 1; },
                          [](const ActuatorRange&) -> std::size_t { return 1; },
                          [](const ServoIMU&) -> std::size_t { return 3; },
                      },
                      model);
}

std::string model_name(const StimulusModel& model) {
    return std::visit(overloaded{
                          [](const BlinkPhoto&) { return std::string("blink_photo"); },
                          [](const ActuatorRange&) { return std::string("actuator_range"); },
                          [](const ServoIMU&) { return std::string("servo_imu"); },
                      },
                      model);
}

FaultProfile parse_fault(std::string_view text) {
    std::string_view name = text;
    double param = 0.0;
    bool has_param = false;
    std::size_t colon = text.find(':');
    if (colon != std::string_view::npos) {
        name = text.substr(0, colon);
        auto parsed = detail::parse_strict_double(detail::trim(text.substr(colon + 1)));
        if (!parsed) raise(Errc::InvalidArgument, "bad fault parameter in '" + std::string(text) + "'");
        param = *parsed;
        has_param = true;
    }
    if (name == "none") return NoFault{};
    if (name == "all_zeros") return AllZeros{};
    if (name == "channel_swap") return ChannelSwap{};
    if (!has_param) raise(Errc::InvalidArgument, "fault '" + std::string(name) + "' needs a parameter");
    if (name == "scale") return ScaleFactor{param};
    if (name == "jitter") return TimeJitter{param};
    if (name == "drop") return DropLines{param};
    if (name == "garbage") return GarbageLines{param};
    raise(Errc::InvalidArgument, "unknown fault '" + std::string(name) + "'");
}

std::string fault_name(const FaultProfile& fault) {
    return std::visit(
        overloaded{
            [](const NoFault&) { return std::string("none"); },
            [](const AllZeros&) { return std::string("all_zeros"); },
            [](const ScaleFactor& f) { return "scale:" + detail::format_double(f.k); },
            [](const TimeJitter& f) { return "jitter:" + detail::format_double(f.sigma_frac); },
            [](const DropLines& f) { return "drop:" + detail::format_double(f.p); },
            [](const GarbageLines& f) { return "garbage:" + detail::format_double(f.p); },
            [](const ChannelSwap&) { return std::string("channel_swap"); },
        },
        fault);
}

// --- lease bookkeeping ---

Lease::Lease(Lease&& other) noexcept : device_(other.device_) {
    other.device_ = nullptr;
}

Lease& Lease::operator=(Lease&& other) noexcept {
    if (this != &other) {
        release();
        device_ = other.device_;
        other.device_ = nullptr;
    }
    return *this;
}

Lease::~Lease() {
    release();
}

void Lease::release() {
    if (device_) {
        device_->release_lease();
        device_ = nullptr;
    }
}

Lease Device::lease(const std::string& trial_id) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (leased_) raise(Errc::LeaseViolation, "device already leased to '" + holder_ + "'");
    leased_ = true;
    holder_ = trial_id;
    return Lease(this);
}

bool Device::leased() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return leased_;
}

void Device::require_lease() const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!leased_) raise(Errc::LeaseViolation, "capture on a device that is not leased");
}

void Device::release_lease() {
    std::lock_guard<std::mutex> lock(mutex_);
    leased_ = false;
    holder_.clear();
}

// --- simulated bench ---

namespace {

double model_value(const StimulusModel& model, double t, std::size_t channel) {
    return std::visit(
        overloaded{
            [&](const BlinkPhoto& b) {
                double phase = std::fmod(t, b.period) / b.period;
                return phase < 0.5 ? b.adc_high : b.adc_low;
            },
            [&](const ActuatorRange& r) {
                double phase = std::fmod(t, r.period) / r.period;
                double tri = phase < 0.5 ? 2.0 * phase : 2.0 * (1.0 - phase);
                return r.base_cm + r.span_cm * tri;
            },
            [&](const ServoIMU& s) {
                double phi = s.mount_deg * std::numbers::pi / 180.0;
                double theta = s.angle_deg * std::numbers::pi / 180.0;
                switch (channel) {
                    case 0: return std::sin(phi) * std::cos(theta);
                    case 1: return std::sin(phi) * std::sin(theta);
                    default: return std::cos(phi);
                }
            },
        },
        model);
}

double model_noise_sigma(const StimulusModel& model) {
    return std::visit(overloaded{
                          [](const BlinkPhoto& m) { return m.noise_sigma; },
                          [](const ActuatorRange& m) { return m.noise_sigma; },
                          [](const ServoIMU& m) { return m.noise_sigma; },
                      },
                      model);
}

int model_decimals(const StimulusModel& model) {
    return std::visit(overloaded{
                          [](const BlinkPhoto& m) { return m.decimals; },
                          [](const ActuatorRange& m) { return m.decimals; },
                          [](const ServoIMU& m) { return m.decimals; },
                      },
                      model);
}

constexpr const char* kGarbage[] = {
    "[boot] device ready",
    "E (1023) i2c: bus timeout",
    "### watchdog reset ###",
};

}  // namespace

SimulatedDevice::SimulatedDevice(SimConfig cfg) : cfg_(std::move(cfg)) {}

std::string SimulatedDevice::capture(double duration_s, const SerialFormat& fmt) {
    require_lease();
    fmt.validate();
    if (duration_s <= 0.0) raise(Errc::InvalidArgument, "capture duration must be positive");

    std::size_t channels = model_channel_count(cfg_.model);
    std::size_t fmt_channels = fmt.kind == SerialKind::LabeledLines ? fmt.labels.size() : 1;
    if (channels != fmt_channels) {
        raise(Errc::InvalidArgument, "model '" + model_name(cfg_.model) + "' emits " +
                                         std::to_string(channels) + " channels, format has " +
                                         std::to_string(fmt_channels));
    }

    long n = std::lround(duration_s / fmt.sample_period);
    std::mt19937_64 rng(detail::derive_seed(cfg_.seed, capture_counter_++));
    std::normal_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    const double sigma = model_noise_sigma(cfg_.model);
    const int decimals = model_decimals(cfg_.model);
    const auto* jitter = std::get_if<TimeJitter>(&cfg_.fault);
    const auto* scale = std::get_if<ScaleFactor>(&cfg_.fault);
    const auto* drop = std::get_if<DropLines>(&cfg_.fault);
    const auto* garbage = std::get_if<GarbageLines>(&cfg_.fault);
    const bool zeros = std::holds_alternative<AllZeros>(cfg_.fault);
    const bool swap = std::holds_alternative<ChannelSwap>(cfg_.fault);

    std::string out;
    std::size_t garbage_cursor = 0;
    for (long k = 0; k < n; ++k) {
        double nominal = time_ + static_cast<double>(k) * fmt.sample_period;
        bool active = nominal >= cfg_.fault_from_s;
        // Each line's emission wobbles around the nominal schedule; the
        // device clock itself stays true, so the error never accumulates.
        double t = nominal;
        if (jitter && active) {
            t = nominal + fmt.sample_period * jitter->sigma_frac * unit(rng);
        }

        std::vector<double> values(channels);
        for (std::size_t c = 0; c < channels; ++c) {
            values[c] = model_value(cfg_.model, t, c);
            if (sigma > 0.0) values[c] += sigma * unit(rng);
            if (active) {
                if (zeros) values[c] = 0.0;
                if (scale) values[c] *= scale->k;
            }
        }

        for (std::size_t c = 0; c < channels; ++c) {
            std::size_t from = (swap && active && channels > 1) ? (c + 1) % channels : c;
            if (drop && active && coin(rng) < drop->p) continue;
            if (garbage && active && coin(rng) < garbage->p) {
                out += kGarbage[garbage_cursor++ % 3];
                out += '\n';
                continue;
            }
            if (fmt.kind == SerialKind::LabeledLines) {
                out += fmt.labels[c];
                out += " = ";
            }
            out += detail::format_fixed(values[from], decimals);
            out += '\n';
        }
    }
    time_ += duration_s;
    return out;
}

void SimulatedDevice::command(const StimulusCommand& cmd) {
    if (auto* imu = std::get_if<ServoIMU>(&cfg_.model)) {
        if (cmd.name == "servo_angle") {
            imu->angle_deg = cmd.value;
            return;
        }
    }
    raise(Errc::UnknownCommand,
          "'" + cmd.name + "' is not a command of model '" + model_name(cfg_.model) + "'");
}

// --- physical bench ---

namespace {

speed_t baud_constant(int baud) {
    switch (baud) {
        case 9600: return B9600;
        case 19200: return B19200;
        case 38400: return B38400;
        case 57600: return B57600;
        case 115200: return B115200;
        default:
            raise(Errc::InvalidArgument, "unsupported baud rate " + std::to_string(baud));
    }
}

}  // namespace

SerialDevice::SerialDevice(PhysicalConfig cfg) : cfg_(std::move(cfg)) {
    fd_ = ::open(cfg_.port.c_str(), O_RDWR | O_NOCTTY | O_NONBLOCK);
    if (fd_ < 0) {
        raise(Errc::PortUnavailable, cfg_.port + ": " + std::strerror(errno));
    }
    termios tio{};
    if (tcgetattr(fd_, &tio) != 0) {
        ::close(fd_);
        fd_ = -1;
        raise(Errc::PortUnavailable, cfg_.port + ": tcgetattr failed");
    }
    cfmakeraw(&tio);
    tio.c_cflag |= CREAD | CLOCAL;
    speed_t speed = baud_constant(cfg_.baud);
    cfsetispeed(&tio, speed);
    cfsetospeed(&tio, speed);
    tcsetattr(fd_, TCSANOW, &tio);
    tcflush(fd_, TCIOFLUSH);
}

SerialDevice::~SerialDevice() {
    if (fd_ >= 0) ::close(fd_);
}

std::string SerialDevice::capture(double duration_s, const SerialFormat& fmt) {
    require_lease();
    fmt.validate();
    std::string out;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(duration_s));
    char buf[1024];
    for (;;) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) break;
        int wait_ms = static_cast<int>(
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
        struct pollfd pfd{fd_, POLLIN, 0};
        int rc = poll(&pfd, 1, std::max(1, std::min(wait_ms, 200)));
        if (rc > 0 && (pfd.revents & POLLIN)) {
            ssize_t got = ::read(fd_, buf, sizeof(buf));
            if (got > 0) out.append(buf, static_cast<std::size_t>(got));
        }
    }
    return out;
}

void SerialDevice::command(const StimulusCommand& cmd) {
    if (cfg_.control_port.empty()) {
        raise(Errc::UnknownCommand, "device has no control port for '" + cmd.name + "'");
    }
    int cfd = ::open(cfg_.control_port.c_str(), O_WRONLY | O_NOCTTY);
    if (cfd < 0) {
        raise(Errc::PortUnavailable, cfg_.control_port + ": " + std::strerror(errno));
    }
    std::string line = cmd.name + "=" + detail::format_double(cmd.value) + "\n";
    ssize_t written = ::write(cfd, line.data(), line.size());
    ::close(cfd);
    if (written != static_cast<ssize_t>(line.size())) {
        raise(Errc::PortUnavailable, "short write to " + cfg_.control_port);
    }
}

std::shared_ptr<Device> make_device(const DeviceRef& ref) {
    if (ref.kind == DeviceRef::Kind::Simulated) {
        return std::make_shared<SimulatedDevice>(ref.sim);
    }
    return std::make_shared<SerialDevice>(ref.physical);
}

}  // namespace hilbench
