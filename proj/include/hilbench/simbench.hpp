#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <variant>

#include "hilbench/timeseries.hpp"

namespace hilbench {

// Stimulus models mirror the three physical rigs: an LED blinking at a
// photoresistor, a plate sweeping in front of a rangefinder, and an IMU on a
// tilted servo-driven mount.

struct BlinkPhoto {
    double period = 1.0;      // full blink cycle, seconds
    double adc_low = 112.0;   // counts with the LED off
    double adc_high = 863.0;  // counts with the LED on
    double noise_sigma = 3.0;
    int decimals = 0;
};

struct ActuatorRange {
    double span_cm = 5.0;  // peak-to-peak travel
    double period = 4.0;   // full back-and-forth, seconds
    double base_cm = 20.0;
    double noise_sigma = 0.05;
    int decimals = 3;
};

struct ServoIMU {
    double mount_deg = 55.0;  // fixed tilt of the mounting plate
    double angle_deg = 0.0;   // commanded servo position
    double noise_sigma = 0.005;
    int decimals = 4;
};

using StimulusModel = std::variant<BlinkPhoto, ActuatorRange, ServoIMU>;

std::size_t model_channel_count(const StimulusModel& model);
std::string model_name(const StimulusModel& model);

struct NoFault {};
struct AllZeros {};
struct ScaleFactor {
    double k = 1.0;
};
struct TimeJitter {
    double sigma_frac = 0.0;  // stddev of per-line spacing, fraction of the period
};
struct DropLines {
    double p = 0.0;
};
struct GarbageLines {
    double p = 0.0;
};
struct ChannelSwap {};

using FaultProfile =
    std::variant<NoFault, AllZeros, ScaleFactor, TimeJitter, DropLines, GarbageLines, ChannelSwap>;

// "none", "all_zeros", "scale:2", "jitter:0.2", "drop:0.1", "garbage:0.1",
// "channel_swap".
FaultProfile parse_fault(std::string_view text);
std::string fault_name(const FaultProfile& fault);

struct SimConfig {
    StimulusModel model;
    FaultProfile fault = NoFault{};
    std::uint64_t seed = 0;
    double fault_from_s = 0.0;  // bench time before which the fault stays dormant
};

struct PhysicalConfig {
    std::string port;
    int baud = 9600;
    std::string control_port;  // stimulus commands go here, "name=value" lines
};

struct DeviceRef {
    enum class Kind { Simulated, PhysicalSerial };
    Kind kind = Kind::Simulated;
    SimConfig sim;
    PhysicalConfig physical;
};

struct StimulusCommand {
    std::string name;
    double value = 0.0;
};

class Device;

// RAII exclusivity token. Release is idempotent; destruction releases.
class Lease {
public:
    Lease() = default;
    Lease(Lease&& other) noexcept;
    Lease& operator=(Lease&& other) noexcept;
    Lease(const Lease&) = delete;
    Lease& operator=(const Lease&) = delete;
    ~Lease();

    void release();

private:
    friend class Device;
    explicit Lease(Device* device) : device_(device) {}
    Device* device_ = nullptr;
};

class Device {
public:
    virtual ~Device() = default;

    // Raw serial text observed for duration_s. Requires an active lease.
    virtual std::string capture(double duration_s, const SerialFormat& fmt) = 0;
    virtual void command(const StimulusCommand& cmd) = 0;

    Lease lease(const std::string& trial_id);
    bool leased() const;

protected:
    void require_lease() const;

private:
    friend class Lease;
    void release_lease();

    mutable std::mutex mutex_;
    bool leased_ = false;
    std::string holder_;
};

class SimulatedDevice : public Device {
public:
    explicit SimulatedDevice(SimConfig cfg);

    std::string capture(double duration_s, const SerialFormat& fmt) override;
    void command(const StimulusCommand& cmd) override;

    double bench_time() const { return time_; }

private:
    SimConfig cfg_;
    double time_ = 0.0;
    std::uint64_t capture_counter_ = 0;
};

class SerialDevice : public Device {
public:
    explicit SerialDevice(PhysicalConfig cfg);
    ~SerialDevice() override;

    std::string capture(double duration_s, const SerialFormat& fmt) override;
    void command(const StimulusCommand& cmd) override;

private:
    PhysicalConfig cfg_;
    int fd_ = -1;
};

std::shared_ptr<Device> make_device(const DeviceRef& ref);

}  // namespace hilbench
