#include <Wire.h>

const int AXM_ADDR = 0x48;

void setup() {
  Serial.begin(9600);
  Wire.begin();
  Wire.beginTransmission(AXM_ADDR);
  Wire.write(0x11);
  Wire.write(0x00);
  Wire.endTransmission();
}

void loop() {
  Wire.beginTransmission(AXM_ADDR);
  Wire.write(0x28);
  Wire.endTransmission(false);
  Wire.requestFrom(AXM_ADDR, 6);
  uint8_t xl = Wire.read();
  uint8_t xh = Wire.read();
  int16_t x = (xh << 8) | xl;
  Serial.println(x * 0.000061, 4);
  delay(100);
}
