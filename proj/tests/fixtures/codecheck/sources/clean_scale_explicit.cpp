#include <Wire.h>

const int AXM_ADDR = 0x48;
const float LSB_TO_G = 0.000061;

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
  Wire.write(0x2D);
  Wire.endTransmission(false);
  Wire.requestFrom(AXM_ADDR, 1);
  int z = Wire.read();
  Serial.println(z * LSB_TO_G, 4);
  delay(100);
}
